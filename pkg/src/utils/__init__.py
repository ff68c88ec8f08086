"""
工具模块

包含配置管理、日志记录与命令行辅助函数
"""

from .config import Config
from .logger import get_logger, setup_logging, LoggerMixin, StructuredLogger
from .helpers import format_duration, format_float, parse_range, parse_name_list, db_to_power

__all__ = [
    "Config",
    "get_logger",
    "setup_logging",
    "LoggerMixin",
    "StructuredLogger",
    "format_duration",
    "format_float",
    "parse_range",
    "parse_name_list",
    "db_to_power",
]
