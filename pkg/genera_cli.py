#!/usr/bin/env python3
"""
Exact genus engine - command line entry point
"""

from src.cli import main

if __name__ == "__main__":
    main()
