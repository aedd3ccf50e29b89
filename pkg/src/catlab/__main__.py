"""Allow running the package as a module: python -m catlab."""

import sys

from catlab.cli import main

if __name__ == "__main__":
    sys.exit(main())
