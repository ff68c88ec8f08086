"""
辅助工具函数

提供范围解析、浮点格式化等命令行与扫描共用的功能
"""

import math
from typing import Any, List, Sequence

import numpy as np

from ..core.errors import UsageError


def format_duration(seconds: float) -> str:
    """
    格式化持续时间

    Args:
        seconds: 秒数

    Returns:
        格式化的时间字符串
    """
    if seconds < 1:
        return f"{seconds * 1000:.1f}毫秒"
    elif seconds < 60:
        return f"{seconds:.1f}秒"
    else:
        minutes = seconds / 60
        return f"{minutes:.1f}分钟"


def format_float(value: Any, digits: int = 12) -> str:
    """
    与区域设置无关的浮点格式化（有效数字位数固定）

    Args:
        value: 数值；布尔值与字符串原样输出
        digits: 有效数字位数

    Returns:
        字符串
    """
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        return "0"
    return format(value, f".{digits}g")


def parse_range(text: str, name: str = "range") -> np.ndarray:
    """
    解析标量或 start:stop:step 范围（含端点）

    Args:
        text: 例如 "100" 或 "0.01:1.0:0.01"
        name: 参数名，用于报错

    Returns:
        取值数组
    """
    parts = str(text).strip().split(":")
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise UsageError(f"无法解析 {name}: {text}")

    if len(numbers) == 1:
        return np.array(numbers)
    if len(numbers) != 3:
        raise UsageError(f"{name} 必须为标量或 start:stop:step: {text}")

    start, stop, step = numbers
    if not (step > 0) or not all(math.isfinite(x) for x in numbers):
        raise UsageError(f"{name} 的步长必须为正: {text}")
    if stop < start:
        raise UsageError(f"{name} 为空范围: {text}")

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # 消除累积舍入，保证输出逐字节稳定
    return np.round(start + step * np.arange(count), 12)


def parse_name_list(text: str, allowed: Sequence[str], name: str = "list") -> List[str]:
    """
    解析逗号分隔的名称列表，"all" 展开为全部允许值

    Args:
        text: 逗号分隔字符串
        allowed: 允许的名称（决定输出顺序）
        name: 参数名

    Returns:
        按 allowed 顺序排列的名称列表
    """
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise UsageError(f"{name} 不能为空")
    if "all" in items:
        return list(allowed)
    unknown = [item for item in items if item not in allowed]
    if unknown:
        raise UsageError(f"未知的 {name}: {', '.join(unknown)}")
    return [item for item in allowed if item in items]


def db_to_power(snr_db: float) -> float:
    """SNR(dB) 换算为功率 P = 10^(x/10)"""
    return 10.0 ** (float(snr_db) / 10.0)
