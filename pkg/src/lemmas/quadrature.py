"""
高斯混合微分熵的数值积分

对每个混合分量做张量 Gauss-Hermite 积分，被积函数 log p(x) 用 logsumexp 组合各分量的对数密度；
阶数从最小值起倍增，直到相邻两次结果的相对变化不超过容差
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from pydantic import BaseModel, field_validator, model_validator
from scipy import stats
from scipy.special import logsumexp

from ..core.channel import ChannelKind
from ..core.errors import DomainError
from ..utils.logger import get_logger

logger = get_logger(__name__)

# 张量积节点数随维数指数增长，限制实数维数
MAX_REAL_DIM = 2


class QuadratureOptions(BaseModel):
    """数值积分选项"""
    rel_tol: float = 1e-8
    min_order: int = 32
    max_order: int = 256

    @field_validator("rel_tol")
    @classmethod
    def _positive_tol(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("rel_tol 必须为正")
        return value

    @model_validator(mode="after")
    def _order_range(self) -> "QuadratureOptions":
        if self.min_order < 2 or self.max_order < self.min_order:
            raise ValueError(f"阶数范围无效: [{self.min_order}, {self.max_order}]")
        return self

    @classmethod
    def from_config(cls, config, section: str = "lemma_lab") -> "QuadratureOptions":
        data = config.get_section(section)
        return cls.model_validate({
            key: data[f"quad_{key}"] for key in cls.model_fields if f"quad_{key}" in data
        })


@dataclass
class MixtureSpec:
    """一维高斯混合：权重、均值、标准差"""
    weights: Sequence[float]
    means: Sequence[float]
    stds: Sequence[float]

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.means = np.asarray(self.means, dtype=float)
        self.stds = np.asarray(self.stds, dtype=float)
        if not (len(self.weights) == len(self.means) == len(self.stds)) or len(self.weights) == 0:
            raise DomainError("混合分量的权重、均值、标准差长度必须一致且非空")
        if np.any(self.weights < 0) or not math.isclose(float(np.sum(self.weights)), 1.0, abs_tol=1e-12):
            raise DomainError(f"混合权重必须非负且和为 1: {self.weights.tolist()}")
        if np.any(self.stds <= 0):
            raise DomainError(f"分量标准差必须为正: {self.stds.tolist()}")

    @classmethod
    def symmetric(cls, mu: float, std: float = 1.0) -> "MixtureSpec":
        """等权 ±μ 两分量混合"""
        return cls(weights=(0.5, 0.5), means=(-mu, mu), stds=(std, std))

    @classmethod
    def gaussian(cls, std: float, mean: float = 0.0) -> "MixtureSpec":
        return cls(weights=(1.0,), means=(mean,), stds=(std,))

    @property
    def mean(self) -> float:
        return float(np.sum(self.weights * self.means))

    @property
    def variance(self) -> float:
        second = np.sum(self.weights * (self.stds ** 2 + self.means ** 2))
        return float(second - self.mean ** 2)

    def active(self) -> np.ndarray:
        """权重为正的分量下标"""
        return np.flatnonzero(self.weights > 0)


@dataclass(frozen=True)
class QuadratureResult:
    """数值熵结果（bit）"""
    value: float
    order: int
    rel_change: float
    converged: bool


def _gh_rule(order: int, dim: int):
    """权重 exp(−t²) 的 GH 节点换算到标准正态：x = √2·t，w / π^{d/2}"""
    t, w = hermgauss(order)
    grids = np.meshgrid(*([t] * dim), indexing="ij")
    nodes = math.sqrt(2.0) * np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1) / math.pi ** (dim / 2.0)
    return nodes, weights


def _to_real(means: np.ndarray, covs: np.ndarray, kind: ChannelKind):
    """复圆对称分量展开为实部、虚部各占一半方差的实向量"""
    if kind == ChannelKind.REAL:
        return np.real(means).astype(float), np.real(covs).astype(float)
    if np.any(np.abs(np.imag(covs)) > 0):
        raise DomainError("复混合仅支持实协方差")
    n, d = means.shape
    real_means = np.concatenate([np.real(means), np.imag(means)], axis=1)
    real_covs = np.zeros((n, 2 * d, 2 * d))
    real_covs[:, :d, :d] = 0.5 * np.real(covs)
    real_covs[:, d:, d:] = 0.5 * np.real(covs)
    return real_means, real_covs


def _entropy_at_order(weights, means, covs, active, order) -> float:
    dim = means.shape[1]
    nodes, gh_weights = _gh_rule(order, dim)
    log_w = np.log(weights[active])
    total = 0.0
    for i in active:
        chol = np.linalg.cholesky(covs[i])
        points = means[i] + nodes @ chol.T
        log_comp = np.array([
            stats.multivariate_normal.logpdf(points, mean=means[j], cov=covs[j]) for j in active
        ]).T.reshape(len(points), len(active))
        log_p = logsumexp(log_w + log_comp, axis=1)
        total += weights[i] * float(np.sum(gh_weights * log_p))
    return -total / math.log(2.0)


def mixture_entropy(
    weights: Sequence[float],
    means,
    covs,
    kind: ChannelKind = ChannelKind.REAL,
    opts: Optional[QuadratureOptions] = None,
) -> QuadratureResult:
    """
    高斯混合的微分熵（bit）

    Args:
        weights: 分量权重
        means: 分量均值，形状 (n,) 或 (n, d)
        covs: 分量协方差，形状 (n,) 或 (n, d, d)
        kind: REAL 或 COMPLEX（复数仅支持一维）
        opts: 数值积分选项

    Returns:
        QuadratureResult；阶数达到上限仍未满足容差时 converged 为 False
    """
    opts = opts or QuadratureOptions()
    weights = np.asarray(weights, dtype=float)
    means = np.asarray(means)
    covs = np.asarray(covs)
    if means.ndim == 1:
        means = means[:, None]
    if covs.ndim == 1:
        covs = covs[:, None, None]
    if kind == ChannelKind.COMPLEX and means.shape[1] != 1:
        raise DomainError("复混合仅支持一维变量")
    means, covs = _to_real(means, covs, kind)
    if means.shape[1] > MAX_REAL_DIM:
        raise DomainError(f"实维数超过上限 {MAX_REAL_DIM}: {means.shape[1]}")
    for cov in covs:
        if np.any(np.linalg.eigvalsh(cov) <= 0):
            raise DomainError("分量协方差必须正定")

    active = np.flatnonzero(weights > 0)
    order = opts.min_order
    previous = _entropy_at_order(weights, means, covs, active, order)
    rel_change = math.inf
    while order * 2 <= opts.max_order:
        order *= 2
        current = _entropy_at_order(weights, means, covs, active, order)
        rel_change = abs(current - previous) / max(abs(current), 1.0)
        logger.debug(f"GH 阶数 {order}: h={current:.12f}, 相对变化 {rel_change:.3e}")
        previous = current
        if rel_change <= opts.rel_tol:
            return QuadratureResult(value=current, order=order, rel_change=rel_change, converged=True)

    logger.warning(f"混合熵积分未收敛: 阶数 {order}, 相对变化 {rel_change:.3e}")
    return QuadratureResult(value=previous, order=order, rel_change=rel_change, converged=False)


def mixture_entropy_1d(spec: MixtureSpec, extra_var: float = 0.0, opts: Optional[QuadratureOptions] = None) -> QuadratureResult:
    """一维混合加独立高斯噪声（方差 extra_var）后的熵"""
    return mixture_entropy(spec.weights, spec.means, spec.stds ** 2 + extra_var, opts=opts)
