"""
Integration of all command modules into the command-line parser
"""

from typing import Any

from .commands_bounds import register_bounds_command
from .commands_scenario import register_scenario_command
from .commands_search import register_search_command
from .commands_verify import register_verify_command


def register_all_commands(subparsers: Any) -> None:
    """
    Registers all sub-commands (scenario, bounds, verify, search)
    on the argument parser
    """
    register_scenario_command(subparsers)
    register_bounds_command(subparsers)
    register_verify_command(subparsers)
    register_search_command(subparsers)
