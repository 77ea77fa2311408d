#!/usr/bin/env python3
"""
heavytail CLI script
Run this script to sample the transformations, evaluate their densities or
run the verification suites without installing the package.
"""

import os
import sys

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from heavytail.cli import main

if __name__ == "__main__":
    sys.exit(main())
