"""
Command-line surface: parser construction, logging setup and dispatch
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import load_settings, override_settings
from .errors import MspeLabError
from .extensions import register_all_commands

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_logging_configured = False


def setup_logging(
    level: str = "INFO", log_file: Optional[str] = None
) -> logging.Logger:
    """Set up logging to standard error and, optionally, a file"""
    global _logging_configured
    root = logging.getLogger()
    if _logging_configured:
        root.setLevel(level.upper())
        return root

    root.setLevel(level.upper())
    formatter = logging.Formatter(LOG_FORMAT)

    # Console handler; standard output is reserved for results
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    _logging_configured = True
    return root


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mspe-lab",
        description=(
            "Finite-sample MSPE estimation, model selection and bound verification"
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--log-level", help="Logging level (default: MSPE_LAB_LOG_LEVEL or INFO)"
    )
    parser.add_argument("--log-file", help="Also write the log to this file")
    parser.add_argument(
        "--threads",
        type=int,
        help="Worker cap (default: MSPE_LAB_THREADS or all cores)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_all_commands(subparsers)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run one command

    Returns:
        Exit code: 0 success, 1 runtime error, 2 usage/config/domain error,
        3 failed verification check
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = override_settings(
            load_settings(), threads=args.threads, log_level=args.log_level
        )
        setup_logging(settings.log_level, args.log_file)
        logger.debug("Running %s with settings %s", args.command, settings)
        return int(args.handler(args, settings))
    except MspeLabError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("Interrupted", file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return 1
