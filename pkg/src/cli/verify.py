"""
数值结论验证套件

每个条目给出实测值、期望值、容差与是否通过；容差统一乘以 tolerance_scale，
scale 为 0 时用于检验失败路径
"""

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..analysis.gaps import (
    Regime,
    bound_offset_gap,
    classify,
    delta_inf,
    hk_offset_gap,
    moderate_lower_edge,
    offset_crossing_g2,
)
from ..bounds.lower import (
    TDM_POWER_THRESHOLD,
    hk_a_star,
    hk_brute_force,
    hk_lower_fixed_a,
    r_tdm,
    tdm_hk_crossing_power,
    underline_r,
)
from ..bounds.upper import (
    GENIE_BOUNDS,
    constraints_mask,
    cor1_rbar,
    etw_sum_bound,
    best_upper,
    kramer_sym,
    r_sym_star,
    thm3_entropy_form,
    thm4_entropy_form,
    thm5_a_step_params,
    thm5_b_step_params,
    thm5_bound,
    thm6_branches,
    thm10_entropy_form,
)
from ..core.channel import ChannelParams, GenieParams, UpperBoundId
from ..core.errors import DomainError, SearchError, UsageError
from ..lemmas.lab import (
    GaussianTriple,
    Lemma2Instance,
    corollary7_gap,
    lemma1_gap,
    lemma2_gap,
    random_corollary7_probes,
    random_gaussian_triple,
    random_lemma1_probes,
    random_lemma2_instances,
    random_lemma2_probes,
)
from ..lemmas.quadrature import MixtureSpec, QuadratureOptions
from ..region.rate_region import (
    REGION_BUILDERS,
    RegionOptions,
    intersect_and_trace,
    max_sum_rate,
    tdm_inner_region,
)
from ..search.param_search import SearchOptions
from ..utils.helpers import format_duration
from ..utils.logger import StructuredLogger, get_logger

logger = get_logger(__name__)
slog = StructuredLogger(__name__)

HALF_LOG_2_OVER_SQRT3 = 0.5 * math.log2(2.0 / math.sqrt(3.0))

# 比较关系
LE, GE, EQ = "<=", ">=", "=="


@dataclass
class CriterionEntry:
    """一条验证结果"""
    criterion: str
    name: str
    measured: float
    expected: float
    tolerance: float
    relation: str
    passed: bool = False
    note: str = ""

    def __post_init__(self):
        if self.relation == LE:
            self.passed = self.measured <= self.expected + self.tolerance
        elif self.relation == GE:
            self.passed = self.measured >= self.expected - self.tolerance
        elif self.relation == EQ:
            self.passed = abs(self.measured - self.expected) <= self.tolerance
        else:
            raise UsageError(f"未知的比较关系: {self.relation}")
        if math.isnan(self.measured):
            self.passed = False


@dataclass
class VerifyContext:
    tolerance_scale: float = 1.0
    seed: int = 2024
    entries: List[CriterionEntry] = field(default_factory=list)
    criterion: str = ""

    def check(self, name: str, measured: float, expected: float, tolerance: float, relation: str, note: str = ""):
        entry = CriterionEntry(
            criterion=self.criterion,
            name=name,
            measured=float(measured),
            expected=float(expected),
            tolerance=float(tolerance) * self.tolerance_scale,
            relation=relation,
            note=note,
        )
        slog.log_criterion(f"{self.criterion}/{name}", entry.passed, measured=entry.measured)
        self.entries.append(entry)
        return entry


@dataclass
class VerifyReport:
    entries: List[CriterionEntry]

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "total": len(self.entries),
            "failed": sum(1 for entry in self.entries if not entry.passed),
            "entries": [asdict(entry) for entry in self.entries],
        }


def _moderate_grid(power: float, g2_values: Sequence[float]) -> List[float]:
    return [g2 for g2 in g2_values if classify(power, math.sqrt(g2)).regime == Regime.MODERATE]


# ---------------------------------------------------------------------------
# 条目
# ---------------------------------------------------------------------------

def check_cor3_gap(ctx: VerifyContext):
    """R̄ 与 R*_sym、R*_sym 与下界的差均不超过 ½log₂(2/√3)"""
    g2_values = np.round(np.arange(0.09, 1.0 + 1e-9, 0.01), 12)
    upper_gap, lower_gap = -math.inf, -math.inf
    for power in (30.0, 64.0, 100.0, 1000.0):
        for g2 in _moderate_grid(power, g2_values):
            g = math.sqrt(g2)
            rsym = r_sym_star(power, g)
            upper_gap = max(upper_gap, abs(cor1_rbar(power, g) - rsym))
            lower_gap = max(lower_gap, rsym - underline_r(power, g))
    ctx.check("cor1_minus_r_sym_star", upper_gap, HALF_LOG_2_OVER_SQRT3, 1e-9, LE)
    ctx.check("r_sym_star_minus_lower", lower_gap, HALF_LOG_2_OVER_SQRT3, 1e-9, LE)


def check_delta_inf(ctx: VerifyContext):
    """高信噪比速率差的分段取值"""
    for g2, expected in ((0.086, 0.098), (0.405, 0.021), (0.835, 0.063)):
        ctx.check(f"delta_inf_{g2}", delta_inf(math.sqrt(g2)), expected, 5e-4, EQ)
    zeros = max(abs(delta_inf(0.5)), abs(delta_inf(math.sqrt(0.5))))
    ctx.check("delta_inf_zeros", zeros, 0.0, 1e-12, EQ, note="g² = 0.25 与 0.5")


def check_cor4_gap(ctx: VerifyContext):
    g2_values = np.round(np.arange(0.01, 1.0, 0.005), 12)
    for power in (30.0, 100.0, 1000.0):
        gaps = [cor1_rbar(power, math.sqrt(g2)) - underline_r(power, math.sqrt(g2))
                for g2 in _moderate_grid(power, g2_values)]
        ctx.check(f"delta_P{power:g}", max(gaps), 0.125, 1e-3, LE)


def check_cor5_tdm_gap(ctx: VerifyContext):
    """P = 1584 时 R̄ − R_TDM 的最大值及其位置"""
    power = 1584.0
    edge = moderate_lower_edge(power)
    g2_values = edge + 1e-6 + np.arange(0.0, 1.0 - edge - 1e-6, 1e-4)
    gaps = np.array([cor1_rbar(power, math.sqrt(g2)) - r_tdm(power) for g2 in g2_values])
    index = int(np.argmax(gaps))
    ctx.check("max_cor1_minus_tdm", gaps[index], 0.544, 1e-3, LE)
    ctx.check("argmax_g2", g2_values[index], 0.086, 5e-3, EQ)


def check_tdm_hk_crossing(ctx: VerifyContext):
    power = 23.239
    g = power ** (-1.0 / 6.0)
    difference = abs(hk_lower_fixed_a(power, g) - r_tdm(power))
    ctx.check("hk_fixed_a_vs_tdm", difference, 0.0, 3e-3, EQ, note="实测交点约在 P ≈ 21.9")
    ctx.check("crossing_below_threshold", tdm_hk_crossing_power(), TDM_POWER_THRESHOLD, 0.0, LE)


def check_hk_a_star(ctx: VerifyContext):
    """a* 闭式与暴力最大化一致"""
    a_err, value_err = 0.0, 0.0
    for power in np.geomspace(30.0, 1e4, 20):
        edge = power ** (-1.0 / 3.0)
        for g2 in edge + (1.0 - edge) * np.arange(1, 21) / 21.0:
            g = math.sqrt(g2)
            point = hk_a_star(power, g)
            a_bf, value_bf = hk_brute_force(power, g)
            a_err = max(a_err, abs(point.a_star - a_bf))
            value_err = max(value_err, abs(point.rate - value_bf))
    ctx.check("a_star", a_err, 0.0, 1e-6, EQ)
    ctx.check("rate", value_err, 0.0, 1e-8, EQ)


def check_power_offsets(ctx: VerifyContext):
    powers = [1e5, 1e6, 1e7, 1e8, 1e9]
    for g2 in (0.25, 0.5):
        g = math.sqrt(g2)
        ctx.check(
            f"kramer_offset_g2_{g2}", bound_offset_gap(kramer_sym, r_sym_star, g, powers),
            0.5 * math.log2(1.0 / g), 1e-3, EQ,
        )
        ctx.check(f"hk_fixed_a_offset_g2_{g2}", hk_offset_gap(g, powers), 0.0, 1e-3, EQ)
    ctx.check("cor1_kramer_crossing", offset_crossing_g2(), 0.835, 5e-3, EQ)


def check_thm5_warm_starts(ctx: VerifyContext):
    a_err, b_err = 0.0, 0.0
    for g2 in (0.1, 0.3, 0.7):
        g = math.sqrt(g2)
        for power in (10.0, 100.0):
            ch = ChannelParams.symmetric(power, g)
            b_step = thm5_b_step_params(ch)
            expected_b = r_sym_star(power, g) + 0.5 * math.log2((4.0 * g2 + 1.0) / (4.0 * g))
            b_err = max(b_err, abs(thm5_bound(ch, b_step).value - expected_b))
            a_step = thm5_a_step_params(ch)
            expected_a = r_sym_star(power, g) + thm6_branches(power, g)[0]
            a_err = max(a_err, abs(thm5_bound(ch, a_step).value - expected_a))
    ctx.check("b_step", b_err, 0.0, 1e-9, EQ)
    ctx.check("a_step", a_err, 0.0, 1e-9, EQ)


def _quick_search() -> SearchOptions:
    return SearchOptions(grid_points_per_dim=5, refine_iters=80, restarts=2)


def check_bound_ordering(ctx: VerifyContext):
    """新上界在部分 g² 上明显优于 Kramer 与 ETW"""
    opts = _quick_search()
    for power, margin in ((100.0, 0.05), (10.0, 0.02)):
        best_margin = -math.inf
        for g2 in (0.2, 0.3, 0.5, 0.7):
            ch = ChannelParams.from_g2(power, g2)
            reference = min(kramer_sym(power, math.sqrt(g2)), etw_sum_bound(ch).value)
            best_margin = max(best_margin, reference - best_upper(ch, opts).value)
        ctx.check(f"margin_P{power:g}", best_margin, margin, 0.0, GE)


def check_region_containment(ctx: VerifyContext):
    opts = RegionOptions(points=120, thm9_knots=6, search=_quick_search())
    for power, g2 in ((7.0, 0.2), (100.0, 0.3)):
        ch = ChannelParams.from_g2(power, g2)
        inner = tdm_inner_region(power, opts.points)
        min_slack, max_rise = math.inf, -math.inf
        boundaries = {}
        for name, builder in REGION_BUILDERS.items():
            constraints = builder(ch, opts)
            boundary = intersect_and_trace(constraints, opts.points, name=name)
            boundaries[name] = boundary
            for r1, r2 in inner.points:
                min_slack = min(min_slack, min(c.slack(r1, r2) for c in constraints))
            max_rise = max(max_rise, float(np.max(np.diff(boundary.r1))))
        ctx.check(f"tdm_inside_P{power:g}", min_slack, 0.0, 1e-9, GE)
        ctx.check(f"monotone_P{power:g}", max_rise, 0.0, 1e-9, LE)
        if power == 100.0:
            ctx.check(
                "thm10_sum_face_P100",
                max_sum_rate(boundaries["thm10_thm5"]) - max_sum_rate(boundaries["etw"]),
                0.0, 1e-9, LE,
            )


def check_lemma_lab(ctx: VerifyContext):
    quad = QuadratureOptions()
    count = 100

    equality = max(abs(lemma1_gap(random_gaussian_triple(ctx.seed, i))) for i in range(count))
    equality = max(equality, abs(lemma1_gap(GaussianTriple.from_parts(2.0, 1.0))))
    equality = max(equality, abs(lemma2_gap(Lemma2Instance(1.5, 0.0, 1.0, 0.0, 1.0)).gap))
    equality = max(equality, abs(corollary7_gap(0.5, 1.0, 0.0, MixtureSpec.gaussian(1.3), quad).gap))
    ctx.check("gaussian_equality", equality, 0.0, 1e-9, EQ)

    gaussian_lemma2 = min(r.gap for r in random_lemma2_instances(10_000, ctx.seed))
    ctx.check("lemma2_gaussian_direction", gaussian_lemma2, 0.0, 1e-9, GE)

    for name, probes in (
        ("lemma1_mixture", random_lemma1_probes(count, ctx.seed, quad)),
        ("lemma2_mixture", random_lemma2_probes(count, ctx.seed, quad)),
        ("corollary7_mixture", random_corollary7_probes(count, ctx.seed, quad)),
    ):
        judged = [p for p in probes if p.converged]
        skipped = len(probes) - len(judged)
        measured = min(p.gap for p in judged) if judged else math.nan
        ctx.check(name, measured, 0.0, 1e-6, GE, note=f"未收敛 {skipped} 个")


def _random_feasible(bound_id: UpperBoundId, rng: np.random.Generator, batch: int = 4096, attempts: int = 20):
    """随机弱干扰实信道及其上的一个可行 κ（只扰动活动坐标）"""
    bound = GENIE_BOUNDS[bound_id]
    for _ in range(attempts):
        p1, p2 = 10.0 ** rng.uniform(0.0, 3.0, size=2)
        h12, h21 = rng.uniform(0.2, 1.0, size=2) * rng.choice([-1.0, 1.0], size=2)
        ch = ChannelParams(p1=float(p1), p2=float(p2), h12=float(h12), h21=float(h21))
        columns = {
            name: rng.uniform(0.05, 1.0, batch) if name.startswith("sigma") else rng.uniform(-0.95, 0.95, batch)
            for name in bound.active_fields
        }
        k = GenieParams.unit().with_values(**columns)
        with np.errstate(all="ignore"):
            mask = np.asarray(constraints_mask(bound.constraints(ch, k))) & np.isfinite(bound.closed_form(ch, k))
        hits = np.flatnonzero(mask)
        if len(hits):
            i = int(hits[0])
            return ch, GenieParams.unit().with_values(**{name: float(col[i]) for name, col in columns.items()})
    raise SearchError(f"{bound_id.value}: 未找到可行实例")


def check_oracle_equivalence(ctx: VerifyContext):
    """闭式与逐项熵组装在随机可行实例上一致"""
    oracles: Dict[UpperBoundId, Callable] = {
        UpperBoundId.THM3: thm3_entropy_form,
        UpperBoundId.THM4: thm4_entropy_form,
        UpperBoundId.THM10: thm10_entropy_form,
    }
    for position, (bound_id, oracle) in enumerate(oracles.items()):
        worst = 0.0
        found = 0
        index = 0
        while found < 50 and index < 500:
            rng = np.random.default_rng([ctx.seed, position, index])
            index += 1
            ch, k = _random_feasible(bound_id, rng)
            try:
                reference = oracle(ch, k)
            except DomainError:
                continue
            worst = max(worst, abs(float(GENIE_BOUNDS[bound_id].closed_form(ch, k)) - reference))
            found += 1
        ctx.check(f"{bound_id.value}_oracle", worst if found == 50 else math.nan, 0.0, 1e-9, EQ,
                  note=f"{found} 个实例")


CRITERIA: Dict[str, Callable[[VerifyContext], None]] = {
    "cor3_gap": check_cor3_gap,
    "delta_inf": check_delta_inf,
    "cor4_gap": check_cor4_gap,
    "cor5_tdm_gap": check_cor5_tdm_gap,
    "tdm_hk_crossing": check_tdm_hk_crossing,
    "hk_a_star": check_hk_a_star,
    "power_offsets": check_power_offsets,
    "thm5_warm_starts": check_thm5_warm_starts,
    "bound_ordering": check_bound_ordering,
    "region_containment": check_region_containment,
    "lemma_lab": check_lemma_lab,
    "oracle_equivalence": check_oracle_equivalence,
}


def run_verification(
    only: Optional[Sequence[str]] = None,
    tolerance_scale: float = 1.0,
    seed: int = 2024,
) -> VerifyReport:
    """
    运行验证套件

    Args:
        only: 仅运行这些条目，None 表示全部
        tolerance_scale: 容差缩放系数
        seed: 随机实例种子

    Returns:
        VerifyReport
    """
    if tolerance_scale < 0:
        raise UsageError(f"容差缩放系数不能为负: {tolerance_scale}")
    names = list(CRITERIA) if not only else list(only)
    unknown = [name for name in names if name not in CRITERIA]
    if unknown:
        raise UsageError(f"未知的验证条目: {', '.join(unknown)}")

    ctx = VerifyContext(tolerance_scale=tolerance_scale, seed=seed)
    for name in names:
        ctx.criterion = name
        started = time.perf_counter()
        CRITERIA[name](ctx)
        logger.info(f"验证 {name} 完成，用时 {format_duration(time.perf_counter() - started)}")

    report = VerifyReport(entries=ctx.entries)
    logger.info(f"验证结束: {len(report.entries)} 条，失败 {report.to_dict()['failed']} 条")
    return report
