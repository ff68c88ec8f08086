"""
日志管理模块

提供统一的日志记录功能，命令行输出走 stdout，日志只写 stderr 或文件
"""

import sys
import logging
from typing import Optional, Any
from pathlib import Path
from loguru import logger as loguru_logger

# 移除默认处理器
loguru_logger.remove()

# 全局日志配置
_logger_configured = False

DEFAULT_LEVEL = "WARNING"


def setup_logging(
    level: str = DEFAULT_LEVEL,
    log_file: Optional[str] = None,
    rotation: str = "1 day",
    retention: str = "30 days",
    format_string: Optional[str] = None,
    force: bool = False,
):
    """
    设置日志配置

    Args:
        level: 日志级别
        log_file: 日志文件路径
        rotation: 日志轮转周期
        retention: 日志保留时间
        format_string: 日志格式字符串
        force: 已配置时是否重新配置（命令行 --log-level 使用）
    """
    global _logger_configured

    if _logger_configured and not force:
        return

    loguru_logger.remove()

    # 命令行默认格式不带时间戳，文件格式带时间戳
    if format_string is None:
        format_string = "<level>{level: <8}</level> | <cyan>{name}</cyan>:{line} - <level>{message}</level>"
    file_format = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"

    # 控制台输出
    loguru_logger.add(
        sys.stderr,
        format=format_string,
        level=level.upper(),
        colorize=True
    )

    # 文件输出
    if log_file:
        log_file_path = Path(log_file)
        log_file_path.parent.mkdir(parents=True, exist_ok=True)

        loguru_logger.add(
            log_file,
            format=file_format,
            level=level.upper(),
            rotation=rotation,
            retention=retention,
            compression="zip",
            encoding="utf-8"
        )

    # 设置标准库日志级别
    logging.basicConfig(level=getattr(logging, level.upper()))

    _logger_configured = True


def get_logger(name: str) -> Any:
    """
    获取日志记录器

    Args:
        name: 日志记录器名称

    Returns:
        日志记录器实例
    """
    if not _logger_configured:
        setup_logging()

    return loguru_logger.bind(name=name)


class LoggerMixin:
    """日志混入类"""

    @property
    def logger(self):
        """获取日志记录器"""
        return get_logger(self.__class__.__name__)


class StructuredLogger:
    """结构化日志记录器：事件字段通过 bind 附加到记录上"""

    def __init__(self, name: str):
        self.logger = get_logger(name)

    def _emit(self, level: str, message: str, **fields):
        getattr(self.logger.bind(**fields), level)(message)

    def log_search_start(self, bound_id: str, starts: int, **kwargs):
        """记录参数搜索开始"""
        self._emit("debug", f"参数搜索开始: {bound_id}，起点 {starts} 个", bound_id=bound_id, **kwargs)

    def log_search_complete(self, bound_id: str, value: float, evaluations: int, **kwargs):
        """记录参数搜索完成"""
        self._emit(
            "info",
            f"参数搜索完成: {bound_id} = {value:.9f}（求值 {evaluations} 次）",
            bound_id=bound_id, value=value, evaluations=evaluations, **kwargs
        )

    def log_sweep_row(self, index: int, total: int, **kwargs):
        """记录扫描进度"""
        self._emit("debug", f"扫描进度: {index + 1}/{total}", index=index, total=total, **kwargs)

    def log_criterion(self, name: str, passed: bool, **kwargs):
        """记录验证条目结果"""
        level, verdict = ("info", "通过") if passed else ("warning", "失败")
        self._emit(level, f"验证{verdict}: {name}", criterion=name, **kwargs)
