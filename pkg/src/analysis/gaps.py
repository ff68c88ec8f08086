"""
速率差与高信噪比分析

干扰区间划分、GDOF 换算、有限与渐近速率差、高信噪比容量刻画以及功率偏移估计
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ..bounds.lower import TDM_POWER_THRESHOLD, hk_lower_fixed_a, r_shk, underline_r
from ..bounds.upper import cor1_gamma, cor1_rbar, kramer_sym, r_sym_star
from ..core.errors import DomainError
from ..utils.logger import get_logger

logger = get_logger(__name__)

# 区间与分段常数；0.086 仅用于显示
LOW_G2 = (1.0 - math.sqrt(0.5)) ** 2
MID_G2 = 0.405
HIGH_G2 = 0.835

# 功率偏移序列最后两项的收敛判据（bit）
OFFSET_SPREAD_TOL = 0.01


class Regime(Enum):
    """干扰区间"""
    NOISY = "noisy"                        # |g|(1+g²P) ≤ ½
    MODERATE = "moderate"                  # max(0.086, P^{-1/3}) < g² < 1
    WEAK_NON_MODERATE = "weak_non_moderate"
    STRONG = "strong"                      # g² > 1


@dataclass(frozen=True)
class RegimeLabel:
    """区间标签"""
    regime: Regime
    alpha: Optional[float]
    g2: float


def g2_to_alpha(g2: float, power: float) -> float:
    """α = log(g²P)/log P，要求 P > 1"""
    if not power > 1:
        raise DomainError(f"α 仅在 P > 1 时有定义: P={power}")
    if not g2 > 0:
        raise DomainError(f"g² 必须为正: {g2}")
    return math.log(g2 * power) / math.log(power)


def alpha_to_g2(alpha: float, power: float) -> float:
    """g² = P^{α−1}"""
    if not power > 1:
        raise DomainError(f"α 仅在 P > 1 时有定义: P={power}")
    return power ** (alpha - 1.0)


def noisy_interference(power: float, g: float) -> bool:
    """噪声干扰区间判据 |g|(1+g²P) ≤ ½"""
    return abs(g) * (1.0 + g * g * power) <= 0.5


def moderate_lower_edge(power: float) -> float:
    return max(LOW_G2, power ** (-1.0 / 3.0))


def classify(power: float, g: float) -> RegimeLabel:
    """
    划分干扰区间

    Args:
        power: 功率 P
        g: 对称交叉增益，非零

    Returns:
        RegimeLabel；P ≤ 1 时 alpha 为 None
    """
    if g == 0:
        raise DomainError("g = 0 时无法划分干扰区间")
    if not power > 0:
        raise DomainError(f"功率必须为正: {power}")
    g2 = float(g) ** 2
    alpha = g2_to_alpha(g2, power) if power > 1 else None

    if g2 > 1.0:
        regime = Regime.STRONG
    elif moderate_lower_edge(power) < g2 < 1.0:
        regime = Regime.MODERATE
    elif noisy_interference(power, g):
        regime = Regime.NOISY
    else:
        regime = Regime.WEAK_NON_MODERATE
    return RegimeLabel(regime=regime, alpha=alpha, g2=g2)


def gdof_symmetric(alpha: float) -> float:
    """对称信道每用户归一化 GDOF（W 形曲线）"""
    if alpha < 0:
        raise DomainError(f"α 不能为负: {alpha}")
    return min(1.0, max(alpha / 2.0, 1.0 - alpha / 2.0), max(alpha, 1.0 - alpha))


# ---------------------------------------------------------------------------
# 速率差
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaReport:
    """有限信噪比下的速率差"""
    delta: float       # cor1_rbar − underline_r
    ceiling: float     # 解析上限
    upper: float
    lower: float
    regime_ok: bool


def delta_ceiling(power: float, g: float) -> float:
    """速率差的解析上限（P < 23.3 与否分两种形式）"""
    a = abs(g)
    gamma = cor1_gamma(g)
    if power < TDM_POWER_THRESHOLD:
        return 0.5 * math.log2((a * power + (power + 1.0) / a) / (1.0 + 2.0 * power)) + gamma
    cube = a ** 3
    return max(
        0.5 * math.log2(4.0 / (2.0 * a + 1.0 / a)),
        0.5 * math.log2((1.0 / (a * a) + cube * power) / (1.0 + cube * power)),
    ) + gamma


def delta_gap(power: float, g: float) -> DeltaReport:
    """
    Δ = cor1_rbar − underline_r 及其解析上限

    Args:
        power: 功率 P
        g: 对称交叉增益，P^{-1/3} < g² ≤ 1

    Returns:
        DeltaReport；超出适用范围时 regime_ok 为 False
    """
    upper = cor1_rbar(power, g)
    lower = underline_r(power, g)
    regime_ok = power ** (-1.0 / 3.0) < g * g <= 1.0
    if not regime_ok:
        logger.debug(f"delta_gap 超出适用范围: P={power}, g²={g * g}")
    return DeltaReport(
        delta=upper - lower,
        ceiling=delta_ceiling(power, g),
        upper=upper,
        lower=lower,
        regime_ok=regime_ok,
    )


def delta_inf(g: float) -> float:
    """高信噪比速率差 Δ∞（四段，分段点 0.086、0.405、0.835，左段含端点）"""
    if g == 0 or not math.isfinite(g):
        raise DomainError(f"g 必须非零且有限: {g}")
    g2 = float(g) ** 2
    if g2 > 1.0:
        raise DomainError(f"要求 g² ≤ 1: {g2}")
    a = abs(g)
    if g2 <= LOW_G2:
        return 0.5 * math.log2((4.0 * g2 + 1.0) / (2.0 * g2 + 1.0))
    if g2 <= MID_G2:
        return 0.5 * math.log2((4.0 * g2 + 1.0) / (4.0 * a))
    if g2 <= HIGH_G2:
        return 0.5 * math.log2(2.0 * g2 / math.sqrt(4.0 * g2 - 1.0))
    return 0.5 * math.log2(1.0 / a)


@dataclass(frozen=True)
class HighSnrReport:
    """高信噪比容量刻画"""
    rate: float
    ratio: Optional[float]         # rate / (½log₂P)
    ratio_approx: Optional[float]  # 用 α 表示的近似
    subregime: str                 # H0 / H1
    regime_ok: bool


def high_snr_characterization(power: float, g: float) -> HighSnrReport:
    """
    高信噪比容量刻画：g² < 0.086 时 R*_sym + ½log₂(2|g|+|g|⁻¹) − 1，否则 R*_sym

    Args:
        power: 功率 P
        g: 对称交叉增益

    Returns:
        HighSnrReport；g² 不在 [P^{-1/3}, 1] 时 regime_ok 为 False
    """
    g2 = float(g) ** 2
    regime_ok = power ** (-1.0 / 3.0) <= g2 <= 1.0
    if not regime_ok:
        logger.warning(f"高信噪比刻画超出适用范围: P={power}, g²={g2}")

    if g2 < LOW_G2:
        subregime = "H0"
        rate = r_sym_star(power, g) + 0.5 * math.log2(2.0 * abs(g) + 1.0 / abs(g)) - 1.0
    else:
        subregime = "H1"
        rate = r_sym_star(power, g)

    ratio = ratio_approx = None
    if power > 1:
        ratio = rate / (0.5 * math.log2(power))
        alpha = g2_to_alpha(g2, power)
        ratio_approx = 1.0 - alpha / 2.0 if subregime == "H0" else (3.0 - alpha) / 4.0
    return HighSnrReport(rate=rate, ratio=ratio, ratio_approx=ratio_approx, subregime=subregime, regime_ok=regime_ok)


# ---------------------------------------------------------------------------
# 功率偏移
# ---------------------------------------------------------------------------

@dataclass
class PowerOffset:
    """功率偏移估计（单位：log₂P，即 3 dB）"""
    sequence: List[float] = field(default_factory=list)
    last: float = math.nan
    extrapolated: float = math.nan
    converged: bool = False


def _aitken(values: Sequence[float]) -> float:
    """对最后三项做 Aitken Δ² 外推，分母退化时返回最后一项"""
    if len(values) < 3:
        return values[-1]
    x0, x1, x2 = values[-3:]
    denom = x2 - 2.0 * x1 + x0
    if abs(denom) < 1e-14:
        return x2
    return x2 - (x2 - x1) ** 2 / denom


def power_offset(bound: Callable[[float, float], float], g: float, powers: Sequence[float]) -> PowerOffset:
    """
    估计 log₂P − 2·R(P) 在 P → ∞ 时的极限

    Args:
        bound: (P, g) -> 和速率
        g: 对称交叉增益
        powers: 递增的功率序列（至少 3 个）

    Returns:
        PowerOffset；最后两项相差超过 0.01 bit 时 converged 为 False
    """
    powers = list(powers)
    if len(powers) < 3:
        raise DomainError("功率序列至少需要 3 个值")
    if any(b <= a for a, b in zip(powers, powers[1:])):
        raise DomainError("功率序列必须严格递增")

    sequence = [math.log2(p) - 2.0 * bound(p, g) for p in powers]
    converged = abs(sequence[-1] - sequence[-2]) <= OFFSET_SPREAD_TOL
    if not converged:
        logger.warning(f"功率偏移序列未收敛: 最后两项 {sequence[-2]:.6f}, {sequence[-1]:.6f}")
    return PowerOffset(sequence=sequence, last=sequence[-1], extrapolated=_aitken(sequence), converged=converged)


def offset_rate_gap(offset_a: float, offset_b: float) -> float:
    """两条曲线功率偏移之差换算成极限速率差 (L_b − L_a)/2"""
    return (offset_b - offset_a) / 2.0


def bound_offset_gap(
    bound_a: Callable[[float, float], float],
    bound_b: Callable[[float, float], float],
    g: float,
    powers: Sequence[float],
) -> float:
    """R_a − R_b 的高信噪比极限（由两条功率偏移换算）"""
    offset_a = power_offset(bound_a, g, powers)
    offset_b = power_offset(bound_b, g, powers)
    return offset_rate_gap(offset_a.last, offset_b.last)


def offset_crossing_g2(lo: float = 0.6, hi: float = 0.95, power: float = 1e9) -> float:
    """
    cor1_rbar 与 Kramer 界功率偏移相等处的 g²

    Args:
        lo: 搜索下端
        hi: 搜索上端
        power: 用于近似极限的功率

    Returns:
        交点 g²
    """
    def difference(g2: float) -> float:
        g = math.sqrt(g2)
        return cor1_rbar(power, g) - kramer_sym(power, g)

    return float(brentq(difference, lo, hi, xtol=1e-10))


def max_gap_on_grid(
    gap: Callable[[float, float], float],
    power: float,
    g2_values: Sequence[float],
) -> tuple:
    """在给定 g² 网格上求速率差最大值，返回 (最大值, 对应 g²)"""
    values = np.array([gap(power, math.sqrt(g2)) for g2 in g2_values])
    index = int(np.argmax(values))
    return float(values[index]), float(g2_values[index])


def r_sym_infinity(power: float, g: float) -> float:
    """max(r_shk, underline_r)，高信噪比下与容量刻画一致"""
    return max(r_shk(power, g), underline_r(power, g))


def hk_offset_gap(g: float, powers: Sequence[float]) -> float:
    """hk_lower_fixed_a 相对 R*_sym 的极限速率差"""
    return bound_offset_gap(hk_lower_fixed_a, r_sym_star, g, powers)
