"""Run the command line: ``python -m dampedinls``."""

import sys

from .cli import main

sys.exit(main())
