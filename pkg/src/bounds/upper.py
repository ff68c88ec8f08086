"""
和速率上界

包括 ETW 界、对称 Kramer 界、基于精灵信号与干扰替换信号的参数化上界（定理 3/4/5 及下标交换版本）、
定理 6 的简化界、推论 1 的闭式界，以及这些界的逐点最小值
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.channel import (
    BoundResult,
    ChannelKind,
    ChannelParams,
    GenieParams,
    UpperBoundId,
)
from ..core.entropy import derive_noise, gic_covariances, log_ratio
from ..core.errors import DomainError
from ..utils.logger import get_logger

logger = get_logger(__name__)

# 可行性比较容差（相对）
FEAS_TOL = 1e-12

# 推论 1 的分段点
COR1_BREAK_G2 = 0.405

Constraint = Tuple[str, Any, Any]


def _check_gain(g: float, require_weak: bool = True) -> float:
    """校验对称增益并返回 g²"""
    if g == 0 or not math.isfinite(g):
        raise DomainError(f"对称交叉增益必须非零: g={g}")
    g2 = float(g) ** 2
    if require_weak and g2 > 1.0 + FEAS_TOL:
        raise DomainError(f"要求弱干扰 g² ≤ 1: g²={g2}")
    return g2


def _check_power(power: float):
    if not (power > 0) or not math.isfinite(power):
        raise DomainError(f"功率必须为正且有限: P={power}")


def _inf_if_nan(value):
    arr = np.asarray(value, dtype=float)
    arr = np.where(np.isnan(arr), np.inf, arr)
    return float(arr) if arr.ndim == 0 else arr


# ---------------------------------------------------------------------------
# 对称闭式界
# ---------------------------------------------------------------------------

def r_sym_star(power: float, g: float) -> float:
    """R*_sym = ½log₂(|g|P + |g|⁻¹(P+1))"""
    _check_power(power)
    if g == 0:
        raise DomainError("g = 0 时 R*_sym 无定义")
    a = abs(g)
    return 0.5 * math.log2(a * power + (power + 1.0) / a)


def kramer_sym(power: float, g: float) -> float:
    """
    对称实信道的 Kramer 上界

    Args:
        power: 发射功率 P
        g: 交叉增益，0 < g² ≤ 1

    Returns:
        和速率上界（bit）
    """
    _check_power(power)
    g2 = _check_gain(g)
    root = math.sqrt((1.0 + g2) ** 2 + 4.0 * g2 * (1.0 + g2) * power)
    ratio = (g2 - 1.0 + root) / (abs(g) * (1.0 - g2 + root))
    return r_sym_star(power, g) + 0.5 * math.log2(ratio)


def thm6_var_n1(g2: float) -> float:
    """定理 6 的 σ²_N1 取值规则"""
    return 4.0 * g2 * (1.0 - g2) if g2 <= 0.5 else 1.0


def thm6_branches(power: float, g: float) -> Tuple[float, float]:
    """定理 6 中 min 的两个分支（相对 R*_sym 的增量）"""
    _check_power(power)
    g2 = _check_gain(g)
    var_n1 = thm6_var_n1(g2)
    first = 0.25 * math.log2((g2 * power + var_n1) / (g2 * power + 1.0)) + 0.25 * math.log2(
        4.0 * g2 ** 2 / (var_n1 * (4.0 * g2 - var_n1))
    )
    second = 0.5 * math.log2((4.0 * g2 + 1.0) / (4.0 * abs(g)))
    return first, second


def thm6_simplified(power: float, g: float) -> float:
    """定理 6：R*_sym + min(A 步分支, B 步分支)"""
    return r_sym_star(power, g) + min(thm6_branches(power, g))


def cor1_gamma(g: float) -> float:
    """推论 1 的增量 γ(g)，在 g² = 0.405 处分段"""
    g2 = _check_gain(g)
    if g2 <= COR1_BREAK_G2:
        return 0.5 * math.log2((4.0 * g2 + 1.0) / (4.0 * abs(g)))
    return 0.5 * math.log2(2.0 * g2 / math.sqrt(4.0 * g2 - 1.0))


def cor1_rbar(power: float, g: float) -> float:
    """推论 1：R̄ = R*_sym + γ(g)"""
    return r_sym_star(power, g) + cor1_gamma(g)


# ---------------------------------------------------------------------------
# ETW 外界
# ---------------------------------------------------------------------------

def etw_constraint_values(ch: ChannelParams) -> Dict[str, float]:
    """
    ETW 外界七个约束的右端，在单位方差独立精灵噪声的高斯替代变量上计算

    Args:
        ch: 信道参数

    Returns:
        键为 r1, r2, sum_c, sum_d, sum_e, two_r1_r2, r1_two_r2 的字典
    """
    table = gic_covariances(ch, GenieParams.unit())
    i1_given_x2 = table.entropy("y1", "x2") - table.entropy("z1")
    i2_given_x1 = table.entropy("y2", "x1") - table.entropy("z2")
    i1 = table.entropy("y1") - table.entropy("y1", "x1")
    i2 = table.entropy("y2") - table.entropy("y2", "x2")
    i1_genie = table.mutual_information("x1", ["y1", "s1"])
    i2_genie = table.mutual_information("x2", ["y2", "s2"])
    return {
        "r1": i1_given_x2,
        "r2": i2_given_x1,
        "sum_c": i1_given_x2 + i2,
        "sum_d": i1 + i2_given_x1,
        "sum_e": i1_genie + i2_genie,
        "two_r1_r2": i1_given_x2 + i1 + i2_genie,
        "r1_two_r2": i1_genie + i2_given_x1 + i2,
    }


def etw_sum_bound(ch: ChannelParams) -> BoundResult:
    """ETW 和速率上界：三条和速率约束的最小值"""
    if not ch.weak_interference:
        logger.warning(f"ETW 界要求弱干扰，输入为强干扰: {ch.to_dict()}")
        return BoundResult(
            value=math.inf,
            feasible=False,
            bound_id=UpperBoundId.ETW,
            channel=ch,
            violations=["|h12|² ≤ 1 且 |h21|² ≤ 1"],
        )
    values = etw_constraint_values(ch)
    sums = {name: values[name] for name in ("sum_c", "sum_d", "sum_e")}
    active = min(sums, key=sums.get)
    return BoundResult(
        value=sums[active],
        feasible=True,
        bound_id=UpperBoundId.ETW,
        channel=ch,
        achieving_params=GenieParams.unit(),
        details={"active": active, **sums},
    )


# ---------------------------------------------------------------------------
# 参数化上界的闭式
# ---------------------------------------------------------------------------

def _powers(ch: ChannelParams):
    a12 = abs(ch.h12) ** 2 * ch.p2
    a21 = abs(ch.h21) ** 2 * ch.p1
    return a12, a21, ch.p1 + a12 + 1.0, ch.p2 + a21 + 1.0


def thm3_closed_form(ch: ChannelParams, k: GenieParams):
    """定理 3 的六项闭式（整体乘 ½），κ 字段可为数组"""
    dn = derive_noise(ch, k, with_inverse=False)
    a12, a21, vy1, vy2 = _powers(ch)
    kind = ch.kind
    s1sq = np.asarray(k.sigma_w1) ** 2
    s2sq = np.asarray(k.sigma_w2) ** 2
    v_u1 = a12 + s1sq
    v_u2 = a21 + s2sq

    with np.errstate(divide="ignore", invalid="ignore"):
        num3 = vy1 - np.abs(a12 + k.rho_w1 * k.sigma_w1) ** 2 / v_u1
        den3 = a21 + dn.var_v_w2 - abs(ch.h21) ** 2 * np.abs(k.rho_w1 * k.sigma_w1 - s1sq) ** 2 / v_u1
        num6 = vy2 - np.abs(a21 + k.rho_w2 * k.sigma_w2) ** 2 / v_u2
        den6 = a12 + dn.var_v_w1 - abs(ch.h12) ** 2 * np.abs(k.rho_w2 * k.sigma_w2 - s2sq) ** 2 / v_u2

        total = (
            log_ratio(vy1, a12 + 1.0, kind)
            + log_ratio(v_u1, dn.var_z_minus_w1, kind)
            + log_ratio(num3, den3, kind)
            + log_ratio(vy2, a21 + 1.0, kind)
            + log_ratio(v_u2, dn.var_z_minus_w2, kind)
            + log_ratio(num6, den6, kind)
        )
    return _inf_if_nan(0.5 * total)


def r0_terms(ch: ChannelParams, k: GenieParams) -> Tuple[Any, Any, Any, Any]:
    """R₀ 的四个对数项（未乘 ½）"""
    dn = derive_noise(ch, k, with_inverse=False)
    a12, a21, vy1, vy2 = _powers(ch)
    kind = ch.kind
    n1sq = np.asarray(k.sigma_n1) ** 2
    w2sq = np.asarray(k.sigma_w2) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            log_ratio(a21 + n1sq, a21 + dn.var_v_w2, kind),
            log_ratio(a21 + w2sq, a21 + 1.0, kind),
            log_ratio(vy1 * np.ones_like(n1sq), n1sq, kind),
            log_ratio(vy2 * np.ones_like(w2sq), dn.var_z_minus_w2, kind),
        )


def _n1_w2_terms(ch: ChannelParams, k: GenieParams):
    """定理 4/5/10 共用的条件方差：Var(Y1|S1)、Var(Y2|U2) 及其修正项"""
    if ch.h21 == 0:
        raise DomainError("h21 = 0 时精灵信号 S1 的修正项无定义")
    a12, a21, vy1, vy2 = _powers(ch)
    n1sq = np.asarray(k.sigma_n1) ** 2
    w2sq = np.asarray(k.sigma_w2) ** 2
    v_s1 = a21 + n1sq
    v_u2 = a21 + w2sq
    h21_inv = 1.0 / complex(ch.h21)
    with np.errstate(divide="ignore", invalid="ignore"):
        var_y1_s1 = vy1 - np.abs(np.conj(ch.h21) * ch.p1 + k.rho_n1 * k.sigma_n1) ** 2 / v_s1
        corr_s1 = np.abs(k.rho_n1 * k.sigma_n1 - h21_inv * n1sq) ** 2 / v_s1
        var_y2_u2 = vy2 - np.abs(a21 + k.rho_w2 * k.sigma_w2) ** 2 / v_u2
        corr_u2 = abs(ch.h12) ** 2 * np.abs(k.rho_w2 * k.sigma_w2 - w2sq) ** 2 / v_u2
    return a12, var_y1_s1, corr_s1, var_y2_u2, corr_u2


def thm4_closed_form(ch: ChannelParams, k: GenieParams):
    """定理 4 的闭式加 R₀（整体乘 ½）"""
    dn = derive_noise(ch, k)
    kind = ch.kind
    a12, var_y1_s1, corr_s1, var_y2_u2, corr_u2 = _n1_w2_terms(ch, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (
            log_ratio(var_y1_s1, a12 + dn.var_v_n1 - corr_s1, kind)
            + log_ratio(var_y2_u2, a12 + 1.0 - corr_u2, kind)
            + sum(r0_terms(ch, k))
        )
    return _inf_if_nan(0.5 * total)


def thm5_closed_form(ch: ChannelParams, k: GenieParams):
    """定理 5 的闭式加 R₀（整体乘 ½）"""
    dn = derive_noise(ch, k)
    kind = ch.kind
    a12, var_y1_s1, corr_s1, var_y2_u2, corr_u2 = _n1_w2_terms(ch, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (
            log_ratio(var_y1_s1, a12 + 1.0 - corr_s1, kind)
            + log_ratio(var_y2_u2, a12 + dn.var_v_n1 - corr_u2, kind)
            + sum(r0_terms(ch, k))
        )
    return _inf_if_nan(0.5 * total)


def thm10_closed_form(ch: ChannelParams, k: GenieParams):
    """定理 10 的五项闭式：R1 + 2R2 的上界"""
    dn = derive_noise(ch, k, with_inverse=False)
    kind = ch.kind
    a12, var_y1_s1, _, var_y2_u2, corr_u2 = _n1_w2_terms(ch, k)
    _, a21, _, vy2 = _powers(ch)
    n1sq = np.asarray(k.sigma_n1) ** 2
    w2sq = np.asarray(k.sigma_w2) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        total = (
            log_ratio(a21 + n1sq, a21 + dn.var_v_w2, kind)
            + log_ratio(a21 + w2sq, a21 + 1.0, kind)
            + log_ratio(var_y2_u2, a12 + dn.var_v_n1 - corr_u2, kind)
            + log_ratio(var_y1_s1, n1sq, kind)
            + log_ratio(vy2 * np.ones_like(w2sq), dn.var_z_minus_w2, kind)
        )
    return _inf_if_nan(total)


# ---------------------------------------------------------------------------
# 可行性约束：每项 (描述, 左端, 右端)，要求 左端 ≥ 右端
# ---------------------------------------------------------------------------

def thm3_constraints(ch: ChannelParams, k: GenieParams) -> List[Constraint]:
    dn = derive_noise(ch, k, with_inverse=False)
    return [
        ("σ²_VW1 ≥ |h12|²σ²_{Z2−W2}", dn.var_v_w1, abs(ch.h12) ** 2 * dn.var_z_minus_w2),
        ("σ²_VW2 ≥ |h21|²σ²_{Z1−W1}", dn.var_v_w2, abs(ch.h21) ** 2 * dn.var_z_minus_w1),
    ]


def _vw2_condition(k: GenieParams, dn) -> Constraint:
    return (
        "σ²_VW2 ≥ min(σ²_N1, σ²_W2)",
        dn.var_v_w2,
        np.minimum(np.asarray(k.sigma_n1) ** 2, np.asarray(k.sigma_w2) ** 2),
    )


def thm4_constraints(ch: ChannelParams, k: GenieParams) -> List[Constraint]:
    dn = derive_noise(ch, k)
    return [
        _vw2_condition(k, dn),
        ("σ²_VN1 ≥ σ²_{Z1−h21⁻¹N1}", dn.var_v_n1, dn.var_z1_minus_hinv_n1),
        ("|h12|²σ²_{Z2−W2} ≤ 1", 1.0, abs(ch.h12) ** 2 * dn.var_z_minus_w2),
    ]


def thm5_constraints(ch: ChannelParams, k: GenieParams) -> List[Constraint]:
    dn = derive_noise(ch, k)
    return [
        _vw2_condition(k, dn),
        ("σ²_VN1 ≥ |h12|²σ²_{Z2−W2}", dn.var_v_n1, abs(ch.h12) ** 2 * dn.var_z_minus_w2),
        ("σ²_{Z1−h21⁻¹N1} ≤ 1", 1.0, dn.var_z1_minus_hinv_n1),
    ]


def thm10_constraints(ch: ChannelParams, k: GenieParams) -> List[Constraint]:
    dn = derive_noise(ch, k, with_inverse=False)
    return [
        _vw2_condition(k, dn),
        ("σ²_VN1 ≥ |h12|²σ²_{Z2−W2}", dn.var_v_n1, abs(ch.h12) ** 2 * dn.var_z_minus_w2),
    ]


def constraints_mask(constraints: List[Constraint]):
    """所有约束同时满足的布尔掩码（标量输入返回 bool）"""
    mask = True
    for _, lhs, rhs in constraints:
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        mask = np.logical_and(mask, lhs >= rhs - FEAS_TOL * (1.0 + np.abs(rhs)))
    mask = np.asarray(mask)
    return bool(mask) if mask.ndim == 0 else mask


def violated(constraints: List[Constraint]) -> List[str]:
    """列出被违反的约束（标量 κ）"""
    return [label for label, lhs, rhs in constraints if not constraints_mask([(label, lhs, rhs)])]


def _swap(func: Callable) -> Callable:
    """在下标交换后的信道与 κ 上求值"""
    def swapped(ch: ChannelParams, k: GenieParams):
        return func(ch.swapped(), k.swapped())
    swapped.__name__ = f"{func.__name__}_swapped"
    return swapped


@dataclass(frozen=True)
class GenieBound:
    """依赖 κ 的参数化上界"""
    bound_id: UpperBoundId
    closed_form: Callable[[ChannelParams, GenieParams], Any]
    constraints: Callable[[ChannelParams, GenieParams], List[Constraint]]
    active_fields: Tuple[str, ...]


_W_FIELDS = ("sigma_w1", "sigma_w2", "rho_w1", "rho_w2")
_N1_W2_FIELDS = ("sigma_n1", "sigma_w2", "rho_n1", "rho_w2")
_N2_W1_FIELDS = ("sigma_n2", "sigma_w1", "rho_n2", "rho_w1")

GENIE_BOUNDS: Dict[UpperBoundId, GenieBound] = {
    UpperBoundId.THM3: GenieBound(UpperBoundId.THM3, thm3_closed_form, thm3_constraints, _W_FIELDS),
    UpperBoundId.THM4: GenieBound(UpperBoundId.THM4, thm4_closed_form, thm4_constraints, _N1_W2_FIELDS),
    UpperBoundId.THM4_SWAPPED: GenieBound(
        UpperBoundId.THM4_SWAPPED, _swap(thm4_closed_form), _swap(thm4_constraints), _N2_W1_FIELDS
    ),
    UpperBoundId.THM5: GenieBound(UpperBoundId.THM5, thm5_closed_form, thm5_constraints, _N1_W2_FIELDS),
    UpperBoundId.THM5_SWAPPED: GenieBound(
        UpperBoundId.THM5_SWAPPED, _swap(thm5_closed_form), _swap(thm5_constraints), _N2_W1_FIELDS
    ),
    UpperBoundId.THM10: GenieBound(UpperBoundId.THM10, thm10_closed_form, thm10_constraints, _N1_W2_FIELDS),
    UpperBoundId.THM10_SWAPPED: GenieBound(
        UpperBoundId.THM10_SWAPPED, _swap(thm10_closed_form), _swap(thm10_constraints), _N2_W1_FIELDS
    ),
}


def evaluate_genie_bound(bound_id: UpperBoundId, ch: ChannelParams, k: GenieParams) -> BoundResult:
    """
    在给定 κ 上求参数化上界

    Args:
        bound_id: 界标识
        ch: 信道参数
        k: 精灵参数

    Returns:
        BoundResult；κ 不可行时 feasible=False、value=+inf
    """
    if bound_id not in GENIE_BOUNDS:
        raise DomainError(f"不是参数化上界: {bound_id}")
    bound = GENIE_BOUNDS[bound_id]
    constraints = bound.constraints(ch, k)
    failed = violated(constraints)
    value = float(bound.closed_form(ch, k))
    if failed:
        logger.debug(f"{bound_id.value} 在 κ 处不可行: {failed}")
    return BoundResult(
        value=value,
        feasible=not failed,
        bound_id=bound_id,
        channel=ch,
        achieving_params=k,
        violations=failed,
    )


def thm3_bound(ch: ChannelParams, k: GenieParams) -> BoundResult:
    return evaluate_genie_bound(UpperBoundId.THM3, ch, k)


def thm4_bound(ch: ChannelParams, k: GenieParams) -> BoundResult:
    return evaluate_genie_bound(UpperBoundId.THM4, ch, k)


def thm4_swapped_bound(ch: ChannelParams, k: GenieParams) -> BoundResult:
    return evaluate_genie_bound(UpperBoundId.THM4_SWAPPED, ch, k)


def thm5_bound(ch: ChannelParams, k: GenieParams) -> BoundResult:
    return evaluate_genie_bound(UpperBoundId.THM5, ch, k)


def thm5_swapped_bound(ch: ChannelParams, k: GenieParams) -> BoundResult:
    return evaluate_genie_bound(UpperBoundId.THM5_SWAPPED, ch, k)


# ---------------------------------------------------------------------------
# 熵项组装（独立于闭式的交叉验证）
# ---------------------------------------------------------------------------

def _z_minus(z: str, w: str) -> Dict[str, complex]:
    return {z: 1.0, w: -1.0}


def thm3_entropy_form(ch: ChannelParams, k: GenieParams) -> float:
    """按熵项逐项组装定理 3"""
    t = gic_covariances(ch, k)
    var_zw1 = t.var(_z_minus("z1", "w1"))
    var_zw2 = t.var(_z_minus("z2", "w2"))
    var_vw1 = t.cond_var("w1", _z_minus("z1", "w1"))
    var_vw2 = t.cond_var("w2", _z_minus("z2", "w2"))
    tilde_w2 = max(var_vw2 - abs(ch.h21) ** 2 * var_zw1, 0.0)
    tilde_w1 = max(var_vw1 - abs(ch.h12) ** 2 * var_zw2, 0.0)

    user1 = (
        t.entropy("y1") - t.entropy("y1", "x1")
        + t.entropy("u1") - t.entropy(_z_minus("w1", "z1"))
        + t.entropy("y1", "u1") - t.entropy({"y1": ch.h21}, "u1", extra=tilde_w2)
    )
    user2 = (
        t.entropy("y2") - t.entropy("y2", "x2")
        + t.entropy("u2") - t.entropy(_z_minus("w2", "z2"))
        + t.entropy("y2", "u2") - t.entropy({"y2": ch.h12}, "u2", extra=tilde_w1)
    )
    return 0.5 * (user1 + user2)


def _r0_entropy(t, ch: ChannelParams, var_vw2: float) -> float:
    return (
        t.entropy("s1") - t.entropy({"x1": ch.h21}, extra=var_vw2)
        + t.entropy("u2") - t.entropy("y2", "x2")
        + t.entropy("y1") - t.entropy("n1")
        + t.entropy("y2") - t.entropy(_z_minus("z2", "w2"))
    )


def _n1_w2_entropy_parts(ch: ChannelParams, k: GenieParams):
    t = gic_covariances(ch, k)
    var_vw2 = t.cond_var("w2", _z_minus("z2", "w2"))
    var_vn1 = t.cond_var("z1", "n1")
    var_zw2 = t.var(_z_minus("z2", "w2"))
    var_hinv = t.var({"z1": 1.0, "n1": -1.0 / complex(ch.h21)})
    return t, var_vw2, var_vn1, var_zw2, var_hinv


def thm4_entropy_form(ch: ChannelParams, k: GenieParams) -> float:
    """按熵项逐项组装定理 4（含 R₀）"""
    t, var_vw2, var_vn1, var_zw2, var_hinv = _n1_w2_entropy_parts(ch, k)
    tilde_vn1 = max(var_vn1 - var_hinv, 0.0)
    tilde_z1 = max(1.0 - abs(ch.h12) ** 2 * var_zw2, 0.0)
    total = (
        t.entropy("y1", "s1") - t.entropy("y1", "s1", extra=tilde_vn1)
        + t.entropy("y2", "u2") - t.entropy({"y2": ch.h12}, "u2", extra=tilde_z1)
        + _r0_entropy(t, ch, var_vw2)
    )
    return 0.5 * total


def thm5_entropy_form(ch: ChannelParams, k: GenieParams) -> float:
    """按熵项逐项组装定理 5（含 R₀）"""
    t, var_vw2, var_vn1, var_zw2, var_hinv = _n1_w2_entropy_parts(ch, k)
    tilde_z1 = max(1.0 - var_hinv, 0.0)
    tilde_vn1 = max(var_vn1 - abs(ch.h12) ** 2 * var_zw2, 0.0)
    total = (
        t.entropy("y1", "s1") - t.entropy("y1", "s1", extra=tilde_z1)
        + t.entropy("y2", "u2") - t.entropy({"y2": ch.h12}, "u2", extra=tilde_vn1)
        + _r0_entropy(t, ch, var_vw2)
    )
    return 0.5 * total


def thm10_entropy_form(ch: ChannelParams, k: GenieParams) -> float:
    """按熵项逐项组装定理 10 的 R1 + 2R2 上界"""
    t, var_vw2, var_vn1, var_zw2, _ = _n1_w2_entropy_parts(ch, k)
    tilde_vn1 = max(var_vn1 - abs(ch.h12) ** 2 * var_zw2, 0.0)
    return (
        t.entropy("s1") - t.entropy({"x1": ch.h21}, extra=var_vw2)
        + t.entropy("u2") - t.entropy("y2", "x2")
        + t.entropy("y2", "u2") - t.entropy({"y2": ch.h12}, "u2", extra=tilde_vn1)
        + t.entropy("y1", "s1") - t.entropy("n1")
        + t.entropy("y2") - t.entropy(_z_minus("z2", "w2"))
    )


# ---------------------------------------------------------------------------
# 定理 5 的 A 步 / B 步参数
# ---------------------------------------------------------------------------

def _real_gains(ch: ChannelParams) -> Optional[Tuple[float, float]]:
    h12 = complex(ch.h12)
    h21 = complex(ch.h21)
    if h12.imag != 0.0 or h21.imag != 0.0 or h12.real == 0.0 or h21.real == 0.0:
        return None
    return h12.real, h21.real


def thm5_a_step_params(ch: ChannelParams, var_n1: Optional[float] = None) -> Optional[GenieParams]:
    """
    A 步：令 σ²_{Z1−h21⁻¹N1} = 1、σ_W2 = ρ_W2、σ²_VN1 = |h12|²σ²_{Z2−W2}

    Args:
        ch: 实增益信道
        var_n1: σ²_N1，缺省按定理 6 的规则取值并截断到可行窗口

    Returns:
        GenieParams；σ²_N1 不在可行窗口内时返回 None
    """
    gains = _real_gains(ch)
    if gains is None:
        return None
    c, h = gains
    lower = 4.0 * h * h * (1.0 - c * c)
    upper = min(1.0, 4.0 * h * h)
    if var_n1 is None:
        var_n1 = min(max(thm6_var_n1(abs(c * h)), lower), upper)
    if var_n1 < lower - FEAS_TOL or var_n1 > upper + FEAS_TOL or var_n1 <= 0:
        return None

    sigma_n1 = math.sqrt(var_n1)
    rho_n1 = sigma_n1 / (2.0 * h)
    r2 = 1.0 - (1.0 - rho_n1 ** 2) / (c * c)
    r = math.sqrt(min(max(r2, 0.0), 1.0))
    return GenieParams(sigma_n1=min(sigma_n1, 1.0), sigma_w2=r, rho_n1=max(min(rho_n1, 1.0), -1.0), rho_w2=r)


def thm5_b_step_params(ch: ChannelParams) -> Optional[GenieParams]:
    """
    B 步：σ_W2 = 1，σ²_{Z1−h21⁻¹N1} = 1，σ²_VN1 = |h12|²σ²_{Z2−W2}，σ²_VW2 = σ²_N1

    Returns:
        GenieParams；参数越界时返回 None
    """
    gains = _real_gains(ch)
    if gains is None:
        return None
    c, h = gains
    if ch.is_symmetric:
        var_n1 = 4.0 * h * h / (4.0 * h * h + 1.0)
    else:
        denom = 1.0 - 1.0 / (16.0 * c * c * h * h)
        if abs(denom) < 1e-12:
            return None
        var_n1 = (1.0 - 1.0 / (4.0 * c * c)) / denom
    if not (0.0 < var_n1 <= 1.0 + FEAS_TOL):
        return None

    sigma_n1 = math.sqrt(min(var_n1, 1.0))
    rho_n1 = sigma_n1 / (2.0 * h)
    var_v_n1 = 1.0 - rho_n1 ** 2
    rho_w2 = 1.0 - var_v_n1 / (2.0 * c * c)
    if abs(rho_n1) > 1.0 or abs(rho_w2) > 1.0:
        return None
    return GenieParams(sigma_n1=sigma_n1, sigma_w2=1.0, rho_n1=rho_n1, rho_w2=rho_w2)


def thm5_warm_starts(ch: ChannelParams) -> List[GenieParams]:
    """定理 5 的热启动参数（A 步取规则值与窗口端点，B 步）"""
    starts = []
    gains = _real_gains(ch)
    if gains is not None:
        c, h = gains
        candidates = [None, 4.0 * h * h * (1.0 - c * c), min(1.0, 4.0 * h * h)]
        for var_n1 in candidates:
            params = thm5_a_step_params(ch, var_n1)
            if params is not None:
                starts.append(params)
    b_step = thm5_b_step_params(ch)
    if b_step is not None:
        starts.append(b_step)
    return starts


# ---------------------------------------------------------------------------
# 逐点最小
# ---------------------------------------------------------------------------

def symmetric_closed_forms(ch: ChannelParams) -> Dict[UpperBoundId, float]:
    """对称实信道上的闭式上界；其他信道返回空字典"""
    if not (ch.is_symmetric and ch.kind == ChannelKind.REAL and ch.h12 != 0 and ch.weak_interference):
        return {}
    power, g = ch.p1, float(ch.h12)
    return {
        UpperBoundId.KRAMER_SYM: kramer_sym(power, g),
        UpperBoundId.THM6_SIMPLIFIED: thm6_simplified(power, g),
        UpperBoundId.COR1_RBAR: cor1_rbar(power, g),
    }


def best_upper(ch: ChannelParams, opts=None) -> BoundResult:
    """
    所有已实现上界的逐点最小值

    Args:
        ch: 弱干扰信道
        opts: SearchOptions

    Returns:
        BoundResult，details 中记录各候选界的取值及取得最小值的界
    """
    from ..search.param_search import SearchOptions, minimize_bound

    opts = opts or SearchOptions()
    candidates: Dict[str, BoundResult] = {}

    etw = etw_sum_bound(ch)
    candidates[UpperBoundId.ETW.value] = etw

    for bound_id, value in symmetric_closed_forms(ch).items():
        candidates[bound_id.value] = BoundResult(value=value, feasible=True, bound_id=bound_id, channel=ch)

    if ch.h12 != 0 and ch.h21 != 0 and ch.weak_interference:
        for bound_id in (
            UpperBoundId.THM3, UpperBoundId.THM4, UpperBoundId.THM4_SWAPPED,
            UpperBoundId.THM5, UpperBoundId.THM5_SWAPPED,
        ):
            candidates[bound_id.value] = minimize_bound(bound_id, ch, opts)

    feasible = {name: result for name, result in candidates.items() if result.feasible}
    if not feasible:
        logger.warning(f"没有可行的上界: {ch.to_dict()}")
        return BoundResult(value=math.inf, feasible=False, bound_id=UpperBoundId.BEST_UPPER, channel=ch)

    # 取值相同时按候选顺序取先出现者
    winner = min(feasible, key=lambda name: feasible[name].value)
    best = feasible[winner]
    logger.debug(f"best_upper 由 {winner} 取得: {best.value:.9f}")
    return BoundResult(
        value=best.value,
        feasible=True,
        bound_id=UpperBoundId.BEST_UPPER,
        channel=ch,
        achieving_params=best.achieving_params,
        details={"winner": winner, "candidates": {name: r.value for name, r in candidates.items()}},
    )


