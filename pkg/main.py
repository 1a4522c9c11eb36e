"""
sAGARCH(1,1) Toolkit - Main Entry Point
Run `python main.py --help` for the subcommands
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent))

from frontend.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
