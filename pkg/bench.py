#!/usr/bin/env python3
"""
DMERA Benchmark - Main Entry Point

Free-fermion simulation of DMERA and QAOA circuits for the critical Ising
chain: evaluation, optimisation, symmetry analysis and figure data.
"""

import os
import sys
import logging

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Add the current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from dmera.core import cli  # noqa: E402

logger = logging.getLogger("dmera.bench")


def main():
    """Main entry point for the benchmark CLI"""
    try:
        cli(prog_name="dmera")
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        sys.exit(130)


if __name__ == "__main__":
    main()
