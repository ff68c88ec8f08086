"""
精灵参数搜索

在 κ 的可行集上最小化参数化上界：先在活动坐标的盒子上做向量化网格求值，
再从最好的若干格点与热启动点出发做带边界的 Nelder-Mead 细化，不可行点记为 +inf
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy.optimize import minimize

from ..bounds.upper import (
    GENIE_BOUNDS,
    Constraint,
    constraints_mask,
    thm5_warm_starts,
    violated,
)
from ..core.channel import BoundResult, ChannelParams, GenieParams, UpperBoundId
from ..core.errors import DomainError
from ..utils.logger import StructuredLogger, get_logger

logger = get_logger(__name__)
slog = StructuredLogger(__name__)

# Nelder-Mead 初始单纯形的步长
SIMPLEX_STEP = 0.05

SEARCHABLE_BOUNDS = (
    UpperBoundId.THM3,
    UpperBoundId.THM4,
    UpperBoundId.THM4_SWAPPED,
    UpperBoundId.THM5,
    UpperBoundId.THM5_SWAPPED,
    UpperBoundId.THM10,
    UpperBoundId.THM10_SWAPPED,
)


class SearchOptions(BaseModel):
    """参数搜索选项"""
    grid_points_per_dim: int = 9
    refine_iters: int = 200
    tol_bits: float = 1e-7
    seed: int = 0
    restarts: int = Field(default=8, ge=0)

    @field_validator("grid_points_per_dim")
    @classmethod
    def _grid_at_least_two(cls, value: int) -> int:
        if value < 2:
            raise ValueError("grid_points_per_dim 必须不小于 2")
        return value

    @field_validator("tol_bits")
    @classmethod
    def _positive_tol(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tol_bits 必须为正")
        return value

    @field_validator("refine_iters")
    @classmethod
    def _nonnegative_iters(cls, value: int) -> int:
        if value < 0:
            raise ValueError("refine_iters 不能为负")
        return value

    @classmethod
    def from_config(cls, config, section: str = "search") -> "SearchOptions":
        """从配置节构造，忽略未知键"""
        data = config.get_section(section)
        return cls.model_validate({k: v for k, v in data.items() if k in cls.model_fields})


@dataclass
class SearchOutcome:
    """一次约束最小化的结果"""
    value: float
    params: Optional[GenieParams]
    evaluations: int = 0
    history: List[float] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.params is not None and math.isfinite(self.value)


def _field_box(name: str) -> Tuple[float, float]:
    return (0.0, 1.0) if name.startswith("sigma") else (-1.0, 1.0)


class _Scorer:
    """把活动坐标向量映射为目标值，不可行或非有限记为 +inf"""

    def __init__(
        self,
        objective: Callable[[ChannelParams, GenieParams], Any],
        constraints: Callable[[ChannelParams, GenieParams], List[Constraint]],
        active_fields: Sequence[str],
        ch: ChannelParams,
        base: GenieParams,
    ):
        self.objective = objective
        self.constraints = constraints
        self.active_fields = tuple(active_fields)
        self.ch = ch
        self.base = base
        self.evaluations = 0

    def params(self, columns: Sequence[Any]) -> GenieParams:
        return self.base.with_values(**dict(zip(self.active_fields, columns)))

    def batch(self, points: np.ndarray) -> np.ndarray:
        """points 形状为 (n, d)"""
        self.evaluations += points.shape[0]
        k = self.params([points[:, i] for i in range(points.shape[1])])
        values = np.atleast_1d(np.asarray(self.objective(self.ch, k), dtype=float))
        mask = np.atleast_1d(constraints_mask(self.constraints(self.ch, k)))
        values, mask = np.broadcast_arrays(values, mask)
        return np.where(mask & np.isfinite(values), values, np.inf)

    def __call__(self, x: np.ndarray) -> float:
        lows = np.array([_field_box(name)[0] for name in self.active_fields])
        highs = np.array([_field_box(name)[1] for name in self.active_fields])
        x = np.clip(np.asarray(x, dtype=float), lows, highs)
        return float(self.batch(x[None, :])[0])


def _lexicographic_best(points: np.ndarray, scores: np.ndarray) -> int:
    """最小值中按 κ 字典序取最小者"""
    best = np.min(scores)
    ties = np.flatnonzero(scores == best)
    if len(ties) == 1:
        return int(ties[0])
    order = np.lexsort(points[ties].T[::-1])
    return int(ties[order[0]])


def _initial_simplex(x0: np.ndarray, active_fields: Sequence[str]) -> np.ndarray:
    simplex = [x0]
    for i, name in enumerate(active_fields):
        lo, hi = _field_box(name)
        vertex = x0.copy()
        vertex[i] = x0[i] + SIMPLEX_STEP if x0[i] + SIMPLEX_STEP <= hi else x0[i] - SIMPLEX_STEP
        vertex[i] = min(max(vertex[i], lo), hi)
        simplex.append(vertex)
    return np.array(simplex)


def minimize_genie(
    objective: Callable[[ChannelParams, GenieParams], Any],
    constraints: Callable[[ChannelParams, GenieParams], List[Constraint]],
    active_fields: Sequence[str],
    ch: ChannelParams,
    opts: Optional[SearchOptions] = None,
    warm_starts: Sequence[GenieParams] = (),
    label: str = "genie",
) -> SearchOutcome:
    """
    在活动坐标上最小化任意向量化的 κ 目标

    Args:
        objective: (ch, κ) -> 值，κ 字段可为数组
        constraints: (ch, κ) -> 约束列表
        active_fields: 参与搜索的 κ 字段
        ch: 信道参数
        opts: 搜索选项
        warm_starts: 额外起点
        label: 日志标识

    Returns:
        SearchOutcome；找不到可行点时 params 为 None、value 为 +inf
    """
    opts = opts or SearchOptions()
    active_fields = tuple(active_fields)
    scorer = _Scorer(objective, constraints, active_fields, ch, GenieParams.unit())
    rng = np.random.default_rng(opts.seed)

    axes = [np.linspace(*_field_box(name), opts.grid_points_per_dim) for name in active_fields]
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    grid_scores = scorer.batch(grid)

    candidates = [grid]
    scores = [grid_scores]
    for k in warm_starts:
        point = np.array([[float(np.real(getattr(k, name))) for name in active_fields]])
        candidates.append(point)
        scores.append(scorer.batch(point))
    points = np.concatenate(candidates)
    point_scores = np.concatenate(scores)

    best_index = _lexicographic_best(points, point_scores)
    best_x, best_value = points[best_index].copy(), float(point_scores[best_index])
    history = [best_value]

    # 细化起点：热启动点 + 网格上最好的若干可行点；可行点不足时补随机点
    finite = np.flatnonzero(np.isfinite(point_scores))
    order = finite[np.lexsort((np.arange(len(finite)), point_scores[finite]))]
    warm_indices = [i for i in range(len(grid), len(points)) if np.isfinite(point_scores[i])]
    starts = warm_indices + [i for i in order if i not in warm_indices][: opts.restarts]
    start_points = [points[i] for i in starts]
    if len(start_points) < opts.restarts:
        lows = np.array([_field_box(name)[0] for name in active_fields])
        highs = np.array([_field_box(name)[1] for name in active_fields])
        extra = rng.uniform(lows, highs, size=(opts.restarts - len(start_points), len(active_fields)))
        extra_scores = scorer.batch(extra)
        start_points += [x for x, s in zip(extra, extra_scores) if np.isfinite(s)]

    slog.log_search_start(label, len(start_points))

    bounds = [_field_box(name) for name in active_fields]
    for x0 in start_points:
        if opts.refine_iters == 0:
            break
        res = minimize(
            scorer,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "maxiter": opts.refine_iters,
                "xatol": 1e-10,
                "fatol": opts.tol_bits,
                "initial_simplex": _initial_simplex(np.asarray(x0, dtype=float), active_fields),
            },
        )
        x = np.clip(res.x, [b[0] for b in bounds], [b[1] for b in bounds])
        value = scorer(x)
        if value < best_value or (value == best_value and tuple(x) < tuple(best_x)):
            best_x, best_value = x, value
            logger.debug(f"{label} 新的最优值: {best_value:.12f}")
        history.append(best_value)

    if not math.isfinite(best_value):
        logger.warning(f"{label} 未找到可行的 κ: {ch.to_dict()}")
        return SearchOutcome(value=math.inf, params=None, evaluations=scorer.evaluations, history=history)

    params = scorer.params([float(v) for v in best_x])
    slog.log_search_complete(label, best_value, scorer.evaluations)
    return SearchOutcome(value=best_value, params=params, evaluations=scorer.evaluations, history=history)


def feasibility(bound_id: UpperBoundId, ch: ChannelParams, k: GenieParams) -> Tuple[bool, List[str]]:
    """
    检查 κ 对某个参数化上界是否可行

    Returns:
        (是否可行, 被违反的约束描述列表)
    """
    if bound_id not in GENIE_BOUNDS:
        raise DomainError(f"不是参数化上界: {bound_id}")
    failed = violated(GENIE_BOUNDS[bound_id].constraints(ch, k))
    return not failed, failed


def bound_warm_starts(bound_id: UpperBoundId, ch: ChannelParams) -> List[GenieParams]:
    """各参数化上界的热启动 κ"""
    starts = [GenieParams.unit()]
    if bound_id in (UpperBoundId.THM4, UpperBoundId.THM5, UpperBoundId.THM10):
        starts += thm5_warm_starts(ch)
    elif bound_id in (UpperBoundId.THM4_SWAPPED, UpperBoundId.THM5_SWAPPED, UpperBoundId.THM10_SWAPPED):
        starts += [k.swapped() for k in thm5_warm_starts(ch.swapped())]
    return starts


def minimize_bound(bound_id: UpperBoundId, ch: ChannelParams, opts: Optional[SearchOptions] = None) -> BoundResult:
    """
    在 κ 上最小化参数化上界

    Args:
        bound_id: THM3 / THM4 / THM5 及交换版本，或 THM10
        ch: 弱干扰信道
        opts: 搜索选项

    Returns:
        BoundResult；任何可行 κ 给出的都是有效上界
    """
    if bound_id not in SEARCHABLE_BOUNDS:
        raise DomainError(f"该界不支持参数搜索: {bound_id.value}")
    if not ch.weak_interference:
        return BoundResult(
            value=math.inf, feasible=False, bound_id=bound_id, channel=ch, violations=["要求弱干扰"]
        )

    bound = GENIE_BOUNDS[bound_id]
    outcome = minimize_genie(
        bound.closed_form,
        bound.constraints,
        bound.active_fields,
        ch,
        opts,
        warm_starts=bound_warm_starts(bound_id, ch),
        label=bound_id.value,
    )
    if not outcome.feasible:
        return BoundResult(
            value=math.inf,
            feasible=False,
            bound_id=bound_id,
            channel=ch,
            violations=["未找到可行的 κ"],
            details={"evaluations": outcome.evaluations},
        )
    return BoundResult(
        value=outcome.value,
        feasible=True,
        bound_id=bound_id,
        channel=ch,
        achieving_params=outcome.params,
        details={"evaluations": outcome.evaluations, "history": outcome.history},
    )
