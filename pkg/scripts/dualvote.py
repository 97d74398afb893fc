#!/usr/bin/env python3
"""
dualvote command line
Run `python scripts/dualvote.py --help` for the subcommands
"""

import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.pipeline import main

if __name__ == "__main__":
    sys.exit(main())
