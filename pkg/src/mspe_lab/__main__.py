"""
Command line entry point for mspe-lab
"""
import sys

from .cli import run


def main() -> int:
    """
    Run one mspe-lab command
    """
    return run()


if __name__ == "__main__":
    sys.exit(main())
