"""
可达和速率

时分复用（TDM）、干扰当噪声（TIN）以及 Han-Kobayashi 方案的几个特例
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..core.errors import DomainError
from ..utils.logger import get_logger
from .upper import r_sym_star

logger = get_logger(__name__)

# 下界分段的功率门限
TDM_POWER_THRESHOLD = 23.3

# 暴力搜索的粗网格步长
HK_GRID_STEP = 1e-3


def _check(power: float, g: float, allow_zero: bool = True) -> float:
    if not (power > 0) or not math.isfinite(power):
        raise DomainError(f"功率必须为正且有限: P={power}")
    if not math.isfinite(g):
        raise DomainError(f"增益必须有限: g={g}")
    if not allow_zero and g == 0:
        raise DomainError("g = 0 时该下界无定义")
    return float(g) ** 2


def r_tdm(power: float) -> float:
    """功率受控时分复用：½log₂(1+2P)"""
    _check(power, 1.0)
    return 0.5 * math.log2(1.0 + 2.0 * power)


def r_tin(power: float, g: float) -> float:
    """两用户均把干扰当噪声时的和速率"""
    g2 = _check(power, g)
    return math.log2(1.0 + power / (g2 * power + 1.0))


def in_hk_regime(power: float, g: float) -> bool:
    """P^{-1/3} < g² < 1"""
    g2 = float(g) ** 2
    return power ** (-1.0 / 3.0) < g2 < 1.0


@dataclass(frozen=True)
class HkPoint:
    """Han-Kobayashi 功率分配点"""
    a_star: float        # 私有消息功率占比
    rate: float          # 和速率（bit）
    regime_ok: bool      # 是否满足 P^{-1/3} < g² < 1
    method: str = "closed_form"  # closed_form / numeric


def hk_maxmin(power: float, g: float, a) -> Tuple:
    """
    Han-Kobayashi 特例的 max-min 表达式的两个分支

    Args:
        power: 功率 P
        g: 对称交叉增益
        a: 私有消息功率占比，可为数组

    Returns:
        (第一分支, 第二分支, 二者较小值)
    """
    g2 = _check(power, g)
    a = np.asarray(a, dtype=float)
    total = 1.0 + power + g2 * power
    first = 0.5 * np.log2(total) + 0.25 * np.log2((1.0 + a * power) / (1.0 + g2 * a * power))
    second = 0.5 * np.log2((1.0 + g2 * power) / (1.0 + g2 * a * power)) + 0.5 * np.log2(
        1.0 + a * power + g2 * power
    )
    value = np.minimum(first, second)
    if value.ndim == 0:
        return float(first), float(second), float(value)
    return first, second, value


def hk_brute_force(power: float, g: float) -> Tuple[float, float]:
    """
    数值最大化 max-min 表达式：粗网格后在相邻格点内做有界 Brent 搜索

    Returns:
        (最优 a, 最优值)
    """
    grid = np.linspace(0.0, 1.0, int(round(1.0 / HK_GRID_STEP)) + 1)
    _, _, values = hk_maxmin(power, g, grid)
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]

    res = minimize_scalar(
        lambda a: -hk_maxmin(power, g, a)[2],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    a_opt = float(res.x)
    value = hk_maxmin(power, g, a_opt)[2]
    if value < values[best]:
        a_opt, value = float(grid[best]), float(values[best])
    return a_opt, float(value)


def hk_a_star(power: float, g: float) -> HkPoint:
    """
    max-min 表达式的最优功率分配 a*（两分支交点的闭式解）

    Args:
        power: 功率 P
        g: 对称交叉增益

    Returns:
        HkPoint；闭式分母接近 0 或判别式为负时改用数值最大化
    """
    g2 = _check(power, g)
    regime_ok = in_hk_regime(power, g)
    a0 = (1.0 + power + g2 * power) ** 2
    a1 = (1.0 + g2 * power) ** 2
    a2 = 2.0 * a1 ** 1.5 - a0 * (1.0 + g2)
    lead = a0 * g2 - a1
    disc = a2 ** 2 - 4.0 * lead * (a0 - a1 ** 2)

    if abs(lead) <= 1e-12 * max(a0, a1) or disc < 0:
        a_opt, _ = hk_brute_force(power, g)
        method = "numeric"
        logger.debug(f"a* 闭式不可用，改用数值最大化: P={power}, g²={g2}")
    else:
        a_opt = (a2 + math.sqrt(disc)) / (2.0 * lead * power)
        method = "closed_form"

    a_opt = min(max(a_opt, 0.0), 1.0)
    rate = hk_maxmin(power, g, a_opt)[0]
    return HkPoint(a_star=a_opt, rate=float(rate), regime_ok=regime_ok, method=method)


def hk_sum_at(power: float, g: float, a: float) -> float:
    """给定 a 时的 Han-Kobayashi 和速率（三项对数形式）"""
    g2 = _check(power, g)
    a_bar = 1.0 - a
    return (
        0.5 * math.log2(1.0 + a * power)
        + 0.25 * math.log2(1.0 + (a_bar * power + g2 * power) / (1.0 + a * power))
        + 0.25 * math.log2(1.0 + (power + g2 * a_bar * power) / (1.0 + g2 * a * power))
    )


def hk_sum_anchored(power: float, g: float, a: float) -> float:
    """以 R*_sym 为基准的等价形式"""
    g2 = _check(power, g, allow_zero=False)
    return r_sym_star(power, g) + 0.25 * math.log2((1.0 + a * power) / (1.0 / g2 + a * power))


def hk_sum(power: float, g: float) -> float:
    """
    a = a* 时的 Han-Kobayashi 和速率

    超出 P^{-1/3} < g² < 1 时照常计算，仅记录标记
    """
    point = hk_a_star(power, g)
    if not point.regime_ok:
        logger.debug(f"hk_sum 超出适用范围: P={power}, g={g}")
    return hk_sum_at(power, g, point.a_star)


def hk_lower_fixed_a(power: float, g: float) -> float:
    """a = |g|³ 时的 Han-Kobayashi 下界"""
    g2 = _check(power, g, allow_zero=False)
    if g2 > 1.0:
        raise DomainError(f"要求 g² ≤ 1: g²={g2}")
    cube = abs(g) ** 3
    return r_sym_star(power, g) + 0.25 * math.log2((1.0 + cube * power) / (1.0 / g2 + cube * power))


def r_shk(power: float, g: float) -> float:
    """简化 Han-Kobayashi：½log₂(1+P+g²P) + ½log₂(2+g⁻²) − 1"""
    g2 = _check(power, g, allow_zero=False)
    if g2 > 1.0:
        raise DomainError(f"要求 g² ≤ 1: g²={g2}")
    return 0.5 * math.log2(1.0 + power + g2 * power) + 0.5 * math.log2(2.0 + 1.0 / g2) - 1.0


def r_shk_anchored(power: float, g: float) -> float:
    """R*_sym + ½log₂((2|g|+|g|⁻¹)/4)，高信噪比下与 r_shk 相差 o(1)"""
    _check(power, g, allow_zero=False)
    a = abs(g)
    return r_sym_star(power, g) + 0.5 * math.log2((2.0 * a + 1.0 / a) / 4.0)


def underline_r(power: float, g: float) -> float:
    """分段下界：P < 23.3 取 TDM，否则取 max(hk_lower_fixed_a, r_shk)"""
    if power < TDM_POWER_THRESHOLD:
        return r_tdm(power)
    return max(hk_lower_fixed_a(power, g), r_shk(power, g))


def _tdm_hk_difference(power: float) -> float:
    g = math.sqrt(power ** (-1.0 / 3.0))
    return hk_lower_fixed_a(power, g) - r_tdm(power)


def tdm_hk_crossing_power(lo: float = 10.0, hi: float = 100.0) -> float:
    """
    沿 g² = P^{-1/3} 求 hk_lower_fixed_a 与 r_tdm 相等的功率

    Args:
        lo: 搜索区间下端
        hi: 搜索区间上端

    Returns:
        交点功率
    """
    f_lo, f_hi = _tdm_hk_difference(lo), _tdm_hk_difference(hi)
    if f_lo * f_hi > 0:
        raise DomainError(f"区间 [{lo}, {hi}] 内没有交点")
    return float(brentq(_tdm_hk_difference, lo, hi, xtol=1e-12))
