"""Entry point for ``python -m causalmood``."""

import sys

from causalmood.cli import main

if __name__ == "__main__":
    sys.exit(main())
