"""
异常定义

GIC 界计算中使用的异常层次
"""


class GicBoundsError(Exception):
    """所有 GIC 界计算异常的基类"""


class DomainError(GicBoundsError, ValueError):
    """数值输入不在定义域内（方差非正、增益为零、参数越界、引理前提不满足）"""


class UsageError(GicBoundsError):
    """命令行参数或扫描范围不合法"""


class SearchError(GicBoundsError):
    """参数搜索内部失败"""
