"""
命令行模块

sweep / region / gap / verify 子命令与表格输出
"""

from .app import main, build_parser, EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE
from .tables import SweepBound, SweepSpec, BOUND_NAMES, evaluate_bound, sweep_rows, gap_rows, region_rows, write_rows
from .verify import CRITERIA, VerifyReport, CriterionEntry, run_verification

__all__ = [
    "main",
    "build_parser",
    "EXIT_OK",
    "EXIT_VERIFY_FAILED",
    "EXIT_USAGE",
    "SweepBound",
    "SweepSpec",
    "BOUND_NAMES",
    "evaluate_bound",
    "sweep_rows",
    "gap_rows",
    "region_rows",
    "write_rows",
    "CRITERIA",
    "VerifyReport",
    "CriterionEntry",
    "run_verification",
]
