"""Module entry point: ``python -m osaucs`` behaves like the ``osaucs`` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
