#!/usr/bin/env python3
"""
Anosov Obstructions - Main Entry Point

Decides, from cohomological data, whether a closed manifold can carry an
Anosov diffeomorphism, and explains each verdict.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.config import Config
from src.cli import cli_main


def main():
    """Main entry point for the obstruction engine."""
    try:
        Config.validate()
    except ValueError as e:
        print(f"\n❌ Configuration Error: {e}", file=sys.stderr)
        print("\nCheck the values in your .env file (see .env.example).", file=sys.stderr)
        sys.exit(1)

    try:
        sys.exit(cli_main(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n\n👋 Interrupted\n", file=sys.stderr)
        sys.exit(130)
    except Exception as e:
        print(f"\n❌ Unexpected Error: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
