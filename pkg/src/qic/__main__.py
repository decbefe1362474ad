"""Allow `python -m qic` to behave exactly like the `qic` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
