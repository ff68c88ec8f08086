"""
联合高斯微分熵引擎

提供高斯熵、条件方差、派生噪声方差以及高斯替代变量的协方差表，
所有上界的熵项都由这里组装
"""

import math
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .channel import ChannelKind, ChannelParams, DerivedNoise, GenieParams, prelog
from .errors import DomainError
from ..utils.logger import get_logger

logger = get_logger(__name__)

TWO_PI_E = 2.0 * math.pi * math.e
PI_E = math.pi * math.e

# 方差 Schur 补的截断容差
CLAMP_TOL = 1e-12


def gaussian_entropy(variance, kind: ChannelKind = ChannelKind.REAL):
    """
    高斯微分熵（bit）

    Args:
        variance: 方差，必须为正
        kind: 实信道 ½log₂(2πe·σ²)，复信道 log₂(πe·σ²)

    Returns:
        熵值
    """
    var = np.asarray(variance, dtype=float)
    if np.any(~(var > 0)):
        raise DomainError(f"高斯熵要求方差为正: {variance}")
    if kind == ChannelKind.REAL:
        result = 0.5 * np.log2(TWO_PI_E * var)
    else:
        result = np.log2(PI_E * var)
    return float(result) if result.ndim == 0 else result


def gaussian_joint_entropy(covariance, kind: ChannelKind = ChannelKind.REAL) -> float:
    """
    联合高斯熵的 log-det 形式

    Args:
        covariance: n×n 正定协方差矩阵（复信道为 Hermitian）
        kind: 信道类型

    Returns:
        熵值（bit）
    """
    cov = np.atleast_2d(np.asarray(covariance))
    if cov.shape[0] != cov.shape[1]:
        raise DomainError(f"协方差矩阵必须为方阵: {cov.shape}")
    n = cov.shape[0]
    sign, logdet = np.linalg.slogdet(cov)
    if np.real(sign) <= 0 or not np.isfinite(logdet):
        raise DomainError("协方差矩阵奇异或非正定")
    logdet2 = float(np.real(logdet)) / math.log(2.0)
    if kind == ChannelKind.REAL:
        return 0.5 * (n * math.log2(TWO_PI_E) + logdet2)
    return n * math.log2(PI_E) + logdet2


def conditional_variance(var_a, var_b, cov_ab):
    """
    条件方差 Var(A|B) = Var(A) − |Cov(A,B)|²/Var(B)

    Args:
        var_a: Var(A)
        var_b: Var(B)，必须为正
        cov_ab: Cov(A,B)，可为复数

    Returns:
        截断到非负的条件方差
    """
    var_a = np.asarray(var_a, dtype=float)
    var_b = np.asarray(var_b, dtype=float)
    cov_sq = np.abs(np.asarray(cov_ab)) ** 2
    if np.any(~(var_b > 0)):
        raise DomainError(f"条件变量方差必须为正: {var_b}")
    excess = cov_sq - var_a * var_b
    if np.any(excess > CLAMP_TOL * np.maximum(1.0, var_a * var_b)):
        raise DomainError("协方差超出 Cauchy-Schwarz 界")
    result = np.maximum(var_a - cov_sq / var_b, 0.0)
    return float(result) if result.ndim == 0 else result


def log_ratio(numerator, denominator, kind: ChannelKind = ChannelKind.REAL):
    """带前置系数的 log₂(num/den)，非正分母给出 +inf"""
    num = np.asarray(numerator, dtype=float)
    den = np.asarray(denominator, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
        result = prelog(kind) * np.log2(ratio)
    return float(result) if result.ndim == 0 else result


def _var_v_w(sigma, rho, var_zw):
    """Var(W | Z−W) = σ²(1−|ρ|²)/σ²_{Z−W}；Z−W 退化时条件无效"""
    sigma2 = np.asarray(sigma, dtype=float) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        value = sigma2 * (1.0 - np.abs(rho) ** 2) / var_zw
    value = np.where(var_zw > 1e-15, value, sigma2)
    return np.clip(value, 0.0, None)


def _var_z_minus_hinv_n(h, sigma, rho):
    """Var(Z − h⁻¹N) = 1 + |h|⁻²σ² − 2ℜ{conj(h⁻¹)ρσ}"""
    h_inv = 1.0 / complex(h)
    value = 1.0 + abs(h_inv) ** 2 * np.asarray(sigma) ** 2 - 2.0 * np.real(np.conj(h_inv) * rho * sigma)
    return np.clip(np.real(value), 0.0, None)


def derive_noise(ch: ChannelParams, k: GenieParams, with_inverse: bool = True) -> DerivedNoise:
    """
    计算所有界共用的派生噪声方差

    Args:
        ch: 信道参数
        k: 精灵参数（字段可为数组）
        with_inverse: 是否计算含 h⁻¹ 的方差

    Returns:
        DerivedNoise
    """
    var_zw1 = np.clip(1.0 + np.asarray(k.sigma_w1) ** 2 - 2.0 * np.real(k.rho_w1 * k.sigma_w1), 0.0, None)
    var_zw2 = np.clip(1.0 + np.asarray(k.sigma_w2) ** 2 - 2.0 * np.real(k.rho_w2 * k.sigma_w2), 0.0, None)

    var_hinv1 = None
    var_hinv2 = None
    if with_inverse:
        if ch.h21 == 0 or ch.h12 == 0:
            raise DomainError("交叉增益为零时无法计算 Z − h⁻¹N 的方差")
        var_hinv1 = _var_z_minus_hinv_n(ch.h21, k.sigma_n1, k.rho_n1)
        var_hinv2 = _var_z_minus_hinv_n(ch.h12, k.sigma_n2, k.rho_n2)

    return DerivedNoise(
        var_v_n1=np.clip(1.0 - np.abs(k.rho_n1) ** 2, 0.0, None),
        var_v_n2=np.clip(1.0 - np.abs(k.rho_n2) ** 2, 0.0, None),
        var_v_w1=_var_v_w(k.sigma_w1, k.rho_w1, var_zw1),
        var_v_w2=_var_v_w(k.sigma_w2, k.rho_w2, var_zw2),
        var_z_minus_w1=var_zw1,
        var_z_minus_w2=var_zw2,
        var_z1_minus_hinv_n1=var_hinv1,
        var_z2_minus_hinv_n2=var_hinv2,
    )


SignalSpec = Union[str, Dict[str, complex], np.ndarray]


class CovarianceTable:
    """
    高斯替代变量的二阶矩表

    每个变量表示为独立基变量 (X1, X2, Z1, Z2, E_N1, E_N2, E_W1, E_W2) 的线性组合，
    协方差按 Cov(A,B) = E[A B*] 计算
    """

    BASIS = ("x1", "x2", "z1", "z2", "e_n1", "e_n2", "e_w1", "e_w2")

    def __init__(self, signals: Dict[str, np.ndarray], basis_var: np.ndarray, kind: ChannelKind):
        self.signals = signals
        self.basis_var = basis_var
        self.kind = kind

    def names(self) -> List[str]:
        return list(self.signals.keys())

    def vector(self, spec: SignalSpec) -> np.ndarray:
        """把变量名、线性组合字典或系数向量统一成系数向量"""
        if isinstance(spec, str):
            if spec not in self.signals:
                raise DomainError(f"未知的高斯替代变量: {spec}")
            return self.signals[spec]
        if isinstance(spec, dict):
            vec = np.zeros(len(self.BASIS), dtype=complex)
            for name, coef in spec.items():
                vec = vec + coef * self.vector(name)
            return vec
        return np.asarray(spec, dtype=complex)

    def combo(self, **coefs: complex) -> np.ndarray:
        return self.vector(dict(coefs))

    def cov(self, a: SignalSpec, b: SignalSpec) -> complex:
        va = self.vector(a)
        vb = self.vector(b)
        value = complex(np.sum(va * np.conj(vb) * self.basis_var))
        return value.real if self.kind == ChannelKind.REAL else value

    def var(self, a: SignalSpec) -> float:
        return float(np.real(self.cov(a, a)))

    def matrix(self, names: Sequence[SignalSpec]) -> np.ndarray:
        vectors = np.array([self.vector(name) for name in names])
        mat = (vectors * self.basis_var) @ np.conj(vectors).T
        return np.real(mat) if self.kind == ChannelKind.REAL else mat

    def cond_var(
        self,
        a: SignalSpec,
        given: Optional[Union[SignalSpec, List[SignalSpec]]] = None,
        extra: float = 0.0,
    ) -> float:
        """
        条件方差 Var(A + V | given)，V 为方差 extra 的独立噪声

        Args:
            a: 目标变量
            given: 条件变量（单个或列表）；方差为 0 的单个条件视为无条件
            extra: 额外独立噪声方差

        Returns:
            条件方差
        """
        if given is None:
            return self.var(a) + extra
        if isinstance(given, list):
            k_gg = self.matrix(given)
            c = np.array([self.cov(a, g) for g in given])
            schur = self.var(a) - float(np.real(np.conj(c) @ np.linalg.solve(k_gg, c)))
            return max(schur, 0.0) + extra
        var_g = self.var(given)
        if var_g <= 0:
            return self.var(a) + extra
        return conditional_variance(self.var(a), var_g, self.cov(a, given)) + extra

    def entropy(self, a: SignalSpec, given=None, extra: float = 0.0) -> float:
        return gaussian_entropy(self.cond_var(a, given, extra), self.kind)

    def joint_entropy(self, names: Sequence[SignalSpec]) -> float:
        return gaussian_joint_entropy(self.matrix(names), self.kind)

    def mutual_information(self, a: SignalSpec, outputs: Sequence[SignalSpec]) -> float:
        """I(A; outputs) = h(outputs) − h(outputs | A)，用 log-det 计算"""
        outs = list(outputs)
        h_out = self.joint_entropy(outs)
        k_full = self.matrix(outs)
        c = np.array([self.cov(o, a) for o in outs])
        k_cond = k_full - np.outer(c, np.conj(c)) / self.var(a)
        return h_out - gaussian_joint_entropy(k_cond, self.kind)


def _correlated_noise(sigma: float, rho: complex, z_index: int, e_index: int) -> np.ndarray:
    """构造满足 E[Z N*] = ρσ、Var(N) = σ² 的噪声系数"""
    vec = np.zeros(len(CovarianceTable.BASIS), dtype=complex)
    vec[z_index] = sigma * np.conj(rho)
    vec[e_index] = sigma * math.sqrt(max(1.0 - abs(rho) ** 2, 0.0))
    return vec


def gic_covariances(ch: ChannelParams, k: GenieParams) -> CovarianceTable:
    """
    构造高斯替代变量 {X_iG, Y_iG, S_iG, U_iG, Z_i, N_i, W_i} 的协方差表

    Args:
        ch: 信道参数
        k: 精灵参数（标量字段）

    Returns:
        CovarianceTable
    """
    size = len(CovarianceTable.BASIS)
    unit = np.eye(size, dtype=complex)
    x1, x2, z1, z2 = unit[0], unit[1], unit[2], unit[3]

    n1 = _correlated_noise(float(k.sigma_n1), complex(k.rho_n1), 2, 4)
    n2 = _correlated_noise(float(k.sigma_n2), complex(k.rho_n2), 3, 5)
    w1 = _correlated_noise(float(k.sigma_w1), complex(k.rho_w1), 2, 6)
    w2 = _correlated_noise(float(k.sigma_w2), complex(k.rho_w2), 3, 7)

    signals = {
        "x1": x1,
        "x2": x2,
        "z1": z1,
        "z2": z2,
        "n1": n1,
        "n2": n2,
        "w1": w1,
        "w2": w2,
        "y1": x1 + ch.h12 * x2 + z1,
        "y2": ch.h21 * x1 + x2 + z2,
        "s1": ch.h21 * x1 + n1,
        "s2": ch.h12 * x2 + n2,
        "u1": ch.h12 * x2 + w1,
        "u2": ch.h21 * x1 + w2,
    }
    basis_var = np.array([ch.p1, ch.p2, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    logger.debug(f"构造协方差表: p1={ch.p1}, p2={ch.p2}, kind={ch.kind.value}")
    return CovarianceTable(signals, basis_var, ch.kind)


def conditional_entropy(table: CovarianceTable, target: SignalSpec, given=None, extra: float = 0.0) -> float:
    """
    h(target + V | given)，V 为方差 extra 的独立高斯噪声

    Args:
        table: 协方差表
        target: 变量名或线性组合
        given: 条件变量（单个或列表）
        extra: 额外独立噪声方差

    Returns:
        条件熵（bit）
    """
    return table.entropy(target, given, extra)
