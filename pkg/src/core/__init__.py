"""
核心框架模块

包含信道数据模型、异常层次、高斯熵引擎与扫描执行器
"""

from .errors import GicBoundsError, DomainError, UsageError, SearchError
from .channel import (
    ChannelKind,
    UpperBoundId,
    ChannelParams,
    GenieParams,
    DerivedNoise,
    BoundResult,
    GENIE_FIELDS,
    prelog,
)
from .entropy import (
    gaussian_entropy,
    gaussian_joint_entropy,
    conditional_variance,
    conditional_entropy,
    log_ratio,
    derive_noise,
    gic_covariances,
    CovarianceTable,
)
from .sweep_executor import SweepExecutor

__all__ = [
    "GicBoundsError",
    "DomainError",
    "UsageError",
    "SearchError",
    "ChannelKind",
    "UpperBoundId",
    "ChannelParams",
    "GenieParams",
    "DerivedNoise",
    "BoundResult",
    "GENIE_FIELDS",
    "prelog",
    "gaussian_entropy",
    "gaussian_joint_entropy",
    "conditional_variance",
    "conditional_entropy",
    "log_ratio",
    "derive_noise",
    "gic_covariances",
    "CovarianceTable",
    "SweepExecutor",
]
