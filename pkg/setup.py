#!/usr/bin/env python3

"""DampedINLS installer script.

Install with `pip install .`.

"""

import re

from setuptools import setup


def _readme():
    with open('README.md') as readme:
        return readme.read()


def _version():
    with open('dampedinls/__init__.py') as init:
        return re.search(r"__version__ = '([^']+)'", init.read()).group(1)


setup(
    name='dampedinls',
    version=_version(),
    description='Numerical laboratory for the damped inhomogeneous NLS '
                'equation with an inverse-square potential',
    long_description=_readme(),
    long_description_content_type="text/markdown",
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 or later '
        '(GPLv3+)',
        'Natural Language :: English',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
        'Typing :: Typed',
    ],
    platforms=[
        'POSIX :: Linux'
    ],
    keywords='nls schrodinger damping inverse-square scattering ground-state',
    license='GPLv3+',
    packages=['dampedinls', 'dampedinls.tests'],
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'scipy',
        'hc-passphrase',
    ],
    entry_points={
        'console_scripts': ['dampedinls = dampedinls.cli:main'],
    },
    tests_require=['pytest', 'hypothesis'],
    zip_safe=False,
)
