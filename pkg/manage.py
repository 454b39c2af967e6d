#!/usr/bin/env python
"""Django's command-line utility for the lmlab management commands and test runner."""
from lmlab.cli import main

if __name__ == "__main__":
    main()
