#!/usr/bin/env python3
"""Valuation scaling benchmark (see healthval.benchmark for options)."""

import sys

from healthval.benchmark import main

if __name__ == "__main__":
    sys.exit(main())
