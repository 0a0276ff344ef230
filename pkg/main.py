#!/usr/bin/env python3
"""
Command-line entry point for deeptune.

Usage: python main.py <subcommand> [options]; see ``--help``.
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
