#!/usr/bin/env python3
"""
Open WDVV command-line entry point.

Usage:
    python scripts/owdvv.py derive h0_2 --summary
    python scripts/owdvv.py derive h0_n -n 4
    python scripts/owdvv.py verify my_potential.toml
    python scripts/owdvv.py catalog list
    python scripts/owdvv.py elliptic-check --q-terms 40 --samples 20 --seed 7
"""

import sys
from pathlib import Path

# Add the app directory to the Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
