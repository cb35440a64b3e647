# Command line modules
from .problem import ProblemFile, load_problem, parse_problem
from .report import Check, Report, Verdict
from .commands import RunOptions, build_invariant, run_command
from .main import build_parser, main

__all__ = [
    "ProblemFile", "load_problem", "parse_problem",
    "Check", "Report", "Verdict",
    "RunOptions", "build_invariant", "run_command",
    "build_parser", "main",
]
