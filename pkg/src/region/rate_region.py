"""
容量域外界与内界

ETW 外界的七个约束、基于 EPI 的 R1+2R2 隐式约束（定理 9）、定理 10 的加权和约束、
时分复用内界，以及按 R2 网格求约束交集的边界追踪
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import brentq

from ..bounds.upper import (
    GENIE_BOUNDS,
    constraints_mask,
    etw_constraint_values,
    thm3_constraints,
)
from ..core.channel import ChannelKind, ChannelParams, GenieParams, UpperBoundId, prelog
from ..core.entropy import derive_noise
from ..core.errors import DomainError
from ..search.param_search import SearchOptions, minimize_bound, minimize_genie
from ..utils.logger import get_logger

logger = get_logger(__name__)

# 约束满足判断的容差
REGION_TOL = 1e-9


class ConstraintKind(Enum):
    """约束类型"""
    LINEAR_WEIGHTED = "linear_weighted"  # c1·R1 + c2·R2 ≤ v
    IMPLICIT = "implicit"                # R1 ≤ f(R2) 或 R2 ≤ f(R1)


class RegionOptions(BaseModel):
    """容量域计算选项"""
    points: int = Field(default=400, ge=2)
    thm9_knots: int = Field(default=12, ge=1)
    search: SearchOptions = Field(
        default_factory=lambda: SearchOptions(grid_points_per_dim=7, refine_iters=120, restarts=3)
    )

    @classmethod
    def from_config(cls, config) -> "RegionOptions":
        data = config.get_section("region")
        search = SearchOptions.model_validate(
            {**config.get_section("search"), **(data.get("search") or {})}
        )
        return cls(points=data.get("points", 400), thm9_knots=data.get("thm9_knots", 12), search=search)


@dataclass
class RegionConstraint:
    """
    容量域约束

    LINEAR_WEIGHTED: c1·R1 + c2·R2 ≤ value；
    IMPLICIT: axis="r1" 时 R1 ≤ f(R2)，axis="r2" 时 R2 ≤ f(R1)，f 单调不增
    """
    kind: ConstraintKind
    label: str
    c1: float = 0.0
    c2: float = 0.0
    value: float = math.inf
    evaluator: Optional[Callable[[float], float]] = None
    axis: str = "r1"
    domain_max: float = math.inf
    source: str = ""
    params: Optional[GenieParams] = None

    def __post_init__(self):
        if self.kind == ConstraintKind.LINEAR_WEIGHTED:
            if self.c1 < 0 or self.c2 < 0 or (self.c1 == 0 and self.c2 == 0):
                raise DomainError(f"加权系数必须非负且不全为零: ({self.c1}, {self.c2})")
        elif self.evaluator is None:
            raise DomainError(f"隐式约束缺少求值函数: {self.label}")
        if self.axis not in ("r1", "r2"):
            raise DomainError(f"未知的约束方向: {self.axis}")

    def ceiling_r1(self, r2: float) -> float:
        """给定 R2 时该约束允许的最大 R1（无约束为 +inf，不可达为 −inf）"""
        if self.kind == ConstraintKind.LINEAR_WEIGHTED:
            if self.c1 > 0:
                return (self.value - self.c2 * r2) / self.c1
            return math.inf if self.c2 * r2 <= self.value + REGION_TOL else -math.inf

        if self.axis == "r1":
            return float(self.evaluator(r2))

        # R2 ≤ f(R1)：求 sup{R1 : f(R1) ≥ R2}
        upper = self.domain_max
        if not math.isfinite(upper):
            raise DomainError(f"隐式约束 {self.label} 需要有限的定义域上端")
        if self.evaluator(0.0) < r2:
            return -math.inf
        if self.evaluator(upper) >= r2:
            return math.inf
        return float(brentq(lambda r1: self.evaluator(r1) - r2, 0.0, upper, xtol=1e-13))

    def slack(self, r1: float, r2: float) -> float:
        """约束余量，非负表示满足"""
        if self.kind == ConstraintKind.LINEAR_WEIGHTED:
            return self.value - self.c1 * r1 - self.c2 * r2
        if self.axis == "r1":
            return float(self.evaluator(r2)) - r1
        return float(self.evaluator(r1)) - r2


@dataclass
class RegionBoundary:
    """
    边界点序列：R2 从 0 递增，R1 单调不增
    """
    name: str
    points: List[Tuple[float, float]] = field(default_factory=list)
    resolution: float = 0.0  # R2 网格步长（bit）

    @property
    def r1(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def r2(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def to_rows(self) -> List[Dict[str, float]]:
        return [{"R1": r1, "R2": r2} for r1, r2 in self.points]


def linear(label: str, c1: float, c2: float, value: float, source: str = "", params=None) -> RegionConstraint:
    return RegionConstraint(
        kind=ConstraintKind.LINEAR_WEIGHTED, label=label, c1=c1, c2=c2, value=value, source=source, params=params
    )


# ---------------------------------------------------------------------------
# ETW 外界
# ---------------------------------------------------------------------------

ETW_WEIGHTS = {
    "r1": (1.0, 0.0),
    "r2": (0.0, 1.0),
    "sum_c": (1.0, 1.0),
    "sum_d": (1.0, 1.0),
    "sum_e": (1.0, 1.0),
    "two_r1_r2": (2.0, 1.0),
    "r1_two_r2": (1.0, 2.0),
}


def etw_region(ch: ChannelParams, k_unit: Optional[GenieParams] = None) -> List[RegionConstraint]:
    """
    ETW 外界的七个约束

    Args:
        ch: 弱干扰信道
        k_unit: 精灵噪声参数，只接受单位方差、不相关的取值

    Returns:
        七个加权和约束
    """
    if k_unit is not None and k_unit != GenieParams.unit():
        raise DomainError("ETW 外界只使用单位方差的独立精灵噪声")
    if not ch.weak_interference:
        raise DomainError(f"ETW 外界要求弱干扰: {ch.to_dict()}")
    values = etw_constraint_values(ch)
    return [
        linear(f"etw_{name}", c1, c2, values[name], source=UpperBoundId.ETW.value)
        for name, (c1, c2) in ETW_WEIGHTS.items()
    ]


def single_user_constraints(ch: ChannelParams) -> List[RegionConstraint]:
    """两个单用户约束（ETW 的前两条）"""
    values = etw_constraint_values(ch)
    return [
        linear("etw_r1", 1.0, 0.0, values["r1"], source=UpperBoundId.ETW.value),
        linear("etw_r2", 0.0, 1.0, values["r2"], source=UpperBoundId.ETW.value),
    ]


# ---------------------------------------------------------------------------
# 定理 9：EPI 隐式约束
# ---------------------------------------------------------------------------

def thm9_epi_argument(ch: ChannelParams, k: GenieParams, r2):
    """EPI 项中的方差 (P2+|h21|²P1+1)·2^{−R2/prelog}−1+σ²_W2"""
    vy2 = ch.p2 + abs(ch.h21) ** 2 * ch.p1 + 1.0
    exponent = -np.asarray(r2, dtype=float) / prelog(ch.kind)
    return vy2 * np.power(2.0, exponent) - 1.0 + np.asarray(k.sigma_w2) ** 2


def thm9_epi_term(ch: ChannelParams, k: GenieParams, r2):
    """EPI 熵项（bit）；方差非正时约束失效，返回 +inf"""
    arg = thm9_epi_argument(ch, k, r2)
    const = 2.0 * math.pi * math.e if ch.kind == ChannelKind.REAL else math.pi * math.e
    with np.errstate(divide="ignore", invalid="ignore"):
        value = prelog(ch.kind) * np.log2(const * arg)
    value = np.where(arg > 0, value, np.inf)
    return float(value) if np.ndim(value) == 0 else value


def thm9_ceiling(ch: ChannelParams, k: GenieParams, r2):
    """
    定理 9 给出的 R1 上限 f_κ(R2)，κ 字段可为数组

    Args:
        ch: 信道参数
        k: 精灵参数
        r2: R2 取值

    Returns:
        R1 上限（bit）；EPI 方差非正时为 +inf
    """
    dn = derive_noise(ch, k, with_inverse=False)
    a12 = abs(ch.h12) ** 2 * ch.p2
    a21 = abs(ch.h21) ** 2 * ch.p1
    vy1 = ch.p1 + a12 + 1.0
    vy2 = ch.p2 + a21 + 1.0
    s1sq = np.asarray(k.sigma_w1) ** 2
    s2sq = np.asarray(k.sigma_w2) ** 2
    v_u1 = a12 + s1sq
    v_u2 = a21 + s2sq
    with np.errstate(divide="ignore", invalid="ignore"):
        var_y1_u1 = vy1 - np.abs(a12 + k.rho_w1 * k.sigma_w1) ** 2 / v_u1
        var_y2_u2 = vy2 - np.abs(a21 + k.rho_w2 * k.sigma_w2) ** 2 / v_u2
        var_h21y1 = a21 + dn.var_v_w2 - abs(ch.h21) ** 2 * np.abs(k.rho_w1 * k.sigma_w1 - s1sq) ** 2 / v_u1
        var_h12y2 = a12 + dn.var_v_w1 - abs(ch.h12) ** 2 * np.abs(k.rho_w2 * k.sigma_w2 - s2sq) ** 2 / v_u2

        # 2πe 常数在四正四负的熵项中相消，EPI 项单独计入
        positive = np.log2(v_u1) + np.log2(var_y1_u1) + np.log2(var_y2_u2)
        negative = (
            np.log2(var_h12y2) + np.log2(dn.var_z_minus_w1) + np.log2(var_h21y1) + np.log2(dn.var_z_minus_w2)
        )
        const = 2.0 * math.pi * math.e if ch.kind == ChannelKind.REAL else math.pi * math.e
        rest = prelog(ch.kind) * (positive - negative - np.log2(const))
        value = rest + thm9_epi_term(ch, k, r2) - np.asarray(r2, dtype=float)

    value = np.where(np.isnan(value), np.inf, value)
    return float(value) if np.ndim(value) == 0 else value


def thm9_swapped_ceiling(ch: ChannelParams, k: GenieParams, r1):
    """下标交换版本：R2 ≤ f′_κ(R1)"""
    return thm9_ceiling(ch.swapped(), k.swapped(), r1)


def thm9_feasibility(ch: ChannelParams, k: GenieParams) -> bool:
    """定理 9 的可行集与定理 3 相同（σ_W ≤ 1 由参数盒保证）"""
    return bool(np.all(constraints_mask(thm3_constraints(ch, k))))


_THM9_FIELDS = ("sigma_w1", "sigma_w2", "rho_w1", "rho_w2")
_THM9_SWAPPED_FIELDS = ("sigma_w2", "sigma_w1", "rho_w2", "rho_w1")


def _thm9_side(ch: ChannelParams, k: GenieParams, swapped: bool, r_max: float, knot: Optional[float] = None):
    if swapped:
        return RegionConstraint(
            kind=ConstraintKind.IMPLICIT,
            label="thm9_swapped" if knot is None else f"thm9_swapped@{knot:.6f}",
            evaluator=lambda r1: thm9_swapped_ceiling(ch, k, r1),
            axis="r2",
            domain_max=r_max,
            source=UpperBoundId.THM9_SWAPPED.value,
            params=k,
        )
    return RegionConstraint(
        kind=ConstraintKind.IMPLICIT,
        label="thm9" if knot is None else f"thm9@{knot:.6f}",
        evaluator=lambda r2: thm9_ceiling(ch, k, r2),
        axis="r1",
        domain_max=r_max,
        source=UpperBoundId.THM9.value,
        params=k,
    )


def thm9_constraints(
    ch: ChannelParams,
    k: Optional[GenieParams] = None,
    r2_grid: Optional[Sequence[float]] = None,
    opts: Optional[RegionOptions] = None,
) -> List[RegionConstraint]:
    """
    定理 9 的隐式约束（两侧）

    给定 κ 时返回该 κ 下的两个约束；否则在 r2_grid 的每个节点上对 κ 最小化上限，
    每个节点的最优 κ 都给出一条全局有效的约束，交集即逐点最小

    Args:
        ch: 弱干扰信道
        k: 精灵参数
        r2_grid: 最小化节点，缺省在 [0, 单用户速率] 上均匀取 thm9_knots 个
        opts: 容量域选项

    Returns:
        隐式约束列表
    """
    opts = opts or RegionOptions()
    values = etw_constraint_values(ch)
    r1_max, r2_max = values["r1"], values["r2"]

    if k is not None:
        if not thm9_feasibility(ch, k):
            raise DomainError(f"κ 不满足定理 9 的可行条件: {k.to_dict()}")
        return [_thm9_side(ch, k, False, r2_max), _thm9_side(ch, k, True, r1_max)]

    knots = np.asarray(r2_grid) if r2_grid is not None else np.linspace(0.0, r2_max, opts.thm9_knots)
    constraints = []
    for knot in knots:
        knot = float(knot)
        outcome = minimize_genie(
            lambda c, kk, r=knot: thm9_ceiling(c, kk, r),
            thm3_constraints,
            _THM9_FIELDS,
            ch,
            opts.search,
            warm_starts=[GenieParams.unit()],
            label=f"thm9@{knot:.4f}",
        )
        if outcome.feasible:
            constraints.append(_thm9_side(ch, outcome.params, False, r2_max, knot))

        knot_swapped = knot * r1_max / r2_max if r2_max > 0 else knot
        outcome = minimize_genie(
            lambda c, kk, r=knot_swapped: thm9_swapped_ceiling(c, kk, r),
            lambda c, kk: thm3_constraints(c.swapped(), kk.swapped()),
            _THM9_SWAPPED_FIELDS,
            ch,
            opts.search,
            warm_starts=[GenieParams.unit()],
            label=f"thm9_swapped@{knot_swapped:.4f}",
        )
        if outcome.feasible:
            constraints.append(_thm9_side(ch, outcome.params, True, r1_max, knot_swapped))

    logger.debug(f"定理 9 约束 {len(constraints)} 条（节点 {len(knots)} 个）")
    return constraints


# ---------------------------------------------------------------------------
# 定理 10 与和速率约束
# ---------------------------------------------------------------------------

def thm10_constraint(
    ch: ChannelParams,
    k: Optional[GenieParams] = None,
    opts: Optional[SearchOptions] = None,
) -> List[RegionConstraint]:
    """
    R1 + 2R2 约束及其交换版本 2R1 + R2

    Args:
        ch: 弱干扰信道
        k: 精灵参数；缺省时在 κ 上最小化
        opts: 搜索选项

    Returns:
        两条加权和约束；不可行的 κ 给出 value=+inf 且在 label 中标记
    """
    constraints = []
    for bound_id, (c1, c2) in ((UpperBoundId.THM10, (1.0, 2.0)), (UpperBoundId.THM10_SWAPPED, (2.0, 1.0))):
        bound = GENIE_BOUNDS[bound_id]
        if k is None:
            result = minimize_bound(bound_id, ch, opts)
            value, params, feasible = result.value, result.achieving_params, result.feasible
        else:
            feasible = bool(constraints_mask(bound.constraints(ch, k)))
            value = float(bound.closed_form(ch, k)) if feasible else math.inf
            params = k
        label = bound_id.value if feasible else f"{bound_id.value}(infeasible)"
        if not feasible:
            logger.warning(f"{bound_id.value} 在给定 κ 下不可行，约束失效")
        constraints.append(linear(label, c1, c2, value, source=bound_id.value, params=params))
    return constraints


def sum_rate_constraint(ch: ChannelParams, bound_ids: Sequence[UpperBoundId], opts=None) -> RegionConstraint:
    """若干和速率上界（κ 最小化后）的最小值"""
    best = None
    for bound_id in bound_ids:
        result = minimize_bound(bound_id, ch, opts)
        if result.feasible and (best is None or result.value < best.value):
            best = result
    if best is None:
        return linear("sum(infeasible)", 1.0, 1.0, math.inf)
    return linear(
        f"sum_{best.bound_id.value}", 1.0, 1.0, best.value, source=best.bound_id.value, params=best.achieving_params
    )


# ---------------------------------------------------------------------------
# 外界组合
# ---------------------------------------------------------------------------

def outer_bound_etw(ch: ChannelParams, opts: Optional[RegionOptions] = None) -> List[RegionConstraint]:
    return etw_region(ch)


def outer_bound_thm9(ch: ChannelParams, opts: Optional[RegionOptions] = None) -> List[RegionConstraint]:
    """外界 1：ETW ∩ 定理 3 和速率 ∩ 定理 9 两侧"""
    opts = opts or RegionOptions()
    return (
        etw_region(ch)
        + [sum_rate_constraint(ch, [UpperBoundId.THM3], opts.search)]
        + thm9_constraints(ch, opts=opts)
    )


def outer_bound_thm10(ch: ChannelParams, opts: Optional[RegionOptions] = None) -> List[RegionConstraint]:
    """外界 2：单用户约束 ∩ 定理 5（含交换）和速率 ∩ 定理 10 两侧"""
    opts = opts or RegionOptions()
    return (
        single_user_constraints(ch)
        + [sum_rate_constraint(ch, [UpperBoundId.THM5, UpperBoundId.THM5_SWAPPED], opts.search)]
        + thm10_constraint(ch, opts=opts.search)
    )


# ---------------------------------------------------------------------------
# 边界追踪
# ---------------------------------------------------------------------------

def _r2_limit(constraints: Sequence[RegionConstraint]) -> float:
    limits = [c.value / c.c2 for c in constraints if c.kind == ConstraintKind.LINEAR_WEIGHTED and c.c1 == 0]
    has_r1 = any(c.kind == ConstraintKind.LINEAR_WEIGHTED and c.c2 == 0 for c in constraints)
    if not limits or not has_r1:
        raise DomainError("边界追踪需要两个单用户约束")
    return min(limits)


def _r1_ceiling(constraints: Sequence[RegionConstraint], r2: float) -> float:
    return min(c.ceiling_r1(r2) for c in constraints)


def _reachable_r2(constraints: Sequence[RegionConstraint], r2_max: float, iters: int = 80) -> float:
    """R2 方向上仍有 R1 ≥ 0 可达的最大值（各上限关于 R2 单调不增，二分求得）"""
    if _r1_ceiling(constraints, r2_max) >= -REGION_TOL:
        return r2_max
    if _r1_ceiling(constraints, 0.0) < -REGION_TOL:
        raise DomainError("约束交集为空：R2 = 0 处 R1 也不可达")
    lo, hi = 0.0, r2_max
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _r1_ceiling(constraints, mid) >= -REGION_TOL:
            lo = mid
        else:
            hi = mid
    logger.debug(f"单用户 R2 上限 {r2_max:.9f} 处 R1 不可达，网格截止于 {lo:.9f}")
    return lo


def r2_grid(r2_max: float, points: int) -> np.ndarray:
    return np.linspace(0.0, r2_max, points)


def intersect_and_trace(
    constraints: Sequence[RegionConstraint],
    points: int = 400,
    name: str = "region",
) -> RegionBoundary:
    """
    在 R2 网格上取各约束 R1 上限的最小值

    Args:
        constraints: 约束列表（至少含两个单用户约束）
        points: R2 网格点数
        name: 边界名称

    Returns:
        RegionBoundary；R2 网格截止于仍有 R1 ≥ 0 可达的最大值，R1 截断为非负
    """
    if not constraints:
        raise DomainError("约束列表为空")
    if points < 2:
        raise DomainError(f"网格点数必须不小于 2: {points}")

    r2_max = _reachable_r2(constraints, _r2_limit(constraints))
    grid = r2_grid(r2_max, points)
    boundary = RegionBoundary(name=name, resolution=float(grid[1] - grid[0]))

    for r2 in grid:
        ceiling = _r1_ceiling(constraints, float(r2))
        if not math.isfinite(ceiling):
            raise DomainError(f"R2={r2} 处 R1 没有有限上限")
        boundary.points.append((max(float(ceiling), 0.0), float(r2)))

    logger.debug(f"边界 {name} 追踪完成: {len(boundary.points)} 个点")
    return boundary


def tdm_rates(p1: float, p2: float, lam, kind: ChannelKind = ChannelKind.REAL):
    """功率受控时分：(λ·½log₂(1+P1/λ), (1−λ)·½log₂(1+P2/(1−λ)))"""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(lam > 0, lam * prelog(kind) * np.log2(1.0 + p1 / np.where(lam > 0, lam, 1.0)), 0.0)
        r2 = np.where(lam < 1, (1.0 - lam) * prelog(kind) * np.log2(1.0 + p2 / np.where(lam < 1, 1.0 - lam, 1.0)), 0.0)
    return r1, r2


def tdm_inner_region(
    power: float,
    points: int = 400,
    p2: Optional[float] = None,
    kind: ChannelKind = ChannelKind.REAL,
) -> RegionBoundary:
    """
    时分复用内界在 R2 网格上的边界

    Args:
        power: 用户 1 的功率（p2 缺省时两用户相同）
        points: R2 网格点数
        p2: 用户 2 的功率

    Returns:
        RegionBoundary
    """
    if not power > 0:
        raise DomainError(f"功率必须为正: {power}")
    p1 = power
    p2 = power if p2 is None else p2
    r2_max = prelog(kind) * math.log2(1.0 + p2)
    grid = r2_grid(r2_max, points)
    boundary = RegionBoundary(name="tdm_inner", resolution=float(grid[1] - grid[0]))

    for r2 in grid:
        if r2 <= 0.0:
            lam = 1.0
        elif r2 >= r2_max:
            lam = 0.0
        else:
            # R2 随 λ 单调递减
            lam = brentq(lambda x: float(tdm_rates(p1, p2, x, kind)[1]) - r2, 0.0, 1.0, xtol=1e-14)
        r1, _ = tdm_rates(p1, p2, lam, kind)
        boundary.points.append((float(r1), float(r2)))
    return boundary


def region_contains(constraints: Sequence[RegionConstraint], r1: float, r2: float, tol: float = REGION_TOL) -> bool:
    """速率对是否满足全部约束"""
    return all(c.slack(r1, r2) >= -tol for c in constraints)


def max_sum_rate(boundary: RegionBoundary) -> float:
    """边界上的最大和速率"""
    if not boundary.points:
        raise DomainError(f"边界 {boundary.name} 为空")
    return max(r1 + r2 for r1, r2 in boundary.points)


REGION_BUILDERS: Dict[str, Callable[[ChannelParams, Optional[RegionOptions]], List[RegionConstraint]]] = {
    "etw": outer_bound_etw,
    "thm9_thm1": outer_bound_thm9,
    "thm10_thm5": outer_bound_thm10,
}

REGION_NAMES = ("etw", "thm9_thm1", "thm10_thm5", "tdm_inner")


def trace_region(name: str, ch: ChannelParams, opts: Optional[RegionOptions] = None) -> RegionBoundary:
    """按名称构造并追踪一个区域"""
    opts = opts or RegionOptions()
    if name == "tdm_inner":
        return tdm_inner_region(ch.p1, opts.points, p2=ch.p2, kind=ch.kind)
    if name not in REGION_BUILDERS:
        raise DomainError(f"未知的区域: {name}")
    return intersect_and_trace(REGION_BUILDERS[name](ch, opts), opts.points, name=name)
