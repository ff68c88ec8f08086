"""
扫描、区域与速率差表格

把网格点映射为数据行，并以固定列顺序和稳定的浮点格式写出 CSV 或 JSON
"""

import csv
import json
import math
import sys
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from ..analysis.gaps import (
    alpha_to_g2,
    classify,
    delta_gap,
    delta_inf,
    g2_to_alpha,
    high_snr_characterization,
)
from ..bounds.lower import hk_lower_fixed_a, hk_sum, r_shk, r_tdm, r_tin, underline_r
from ..bounds.upper import best_upper, cor1_rbar, etw_sum_bound, kramer_sym, r_sym_star, thm6_simplified
from ..core.channel import ChannelKind, ChannelParams, UpperBoundId, prelog
from ..core.errors import DomainError, UsageError
from ..core.sweep_executor import SweepExecutor
from ..region.rate_region import REGION_NAMES, RegionOptions, trace_region
from ..search.param_search import SearchOptions, minimize_bound
from ..utils.helpers import db_to_power, format_float, parse_name_list, parse_range
from ..utils.logger import StructuredLogger, get_logger

logger = get_logger(__name__)
slog = StructuredLogger(__name__)

OUTPUT_FORMATS = ("csv", "json")


class SweepBound(Enum):
    """扫描表的界列，定义顺序即列顺序"""
    R_SYM_STAR = "r_sym_star"
    COR1_RBAR = "cor1_rbar"
    THM6 = "thm6"
    KRAMER = "kramer"
    ETW = "etw"
    THM3 = "thm3"
    THM4 = "thm4"
    THM5 = "thm5"
    BEST_UPPER = "best_upper"
    HK = "hk"
    HK_FIXED_A = "hk_fixed_a"
    SHK = "shk"
    TDM = "tdm"
    TIN = "tin"
    UNDERLINE_R = "underline_r"


BOUND_NAMES = tuple(b.value for b in SweepBound)


def _symmetric(func: Callable[[float, float], float]) -> Callable[[ChannelParams, SearchOptions], float]:
    """对称实信道闭式；复信道实增益时每个对数项去掉 ½"""
    def evaluate(ch: ChannelParams, opts: SearchOptions) -> float:
        return func(ch.p1, math.sqrt(ch.g2)) * prelog(ch.kind) / 0.5
    return evaluate


def _searched(bound_id: UpperBoundId) -> Callable[[ChannelParams, SearchOptions], float]:
    def evaluate(ch: ChannelParams, opts: SearchOptions) -> float:
        return minimize_bound(bound_id, ch, opts).value
    return evaluate


BOUND_EVALUATORS: Dict[SweepBound, Callable[[ChannelParams, SearchOptions], float]] = {
    SweepBound.R_SYM_STAR: _symmetric(r_sym_star),
    SweepBound.COR1_RBAR: _symmetric(cor1_rbar),
    SweepBound.THM6: _symmetric(thm6_simplified),
    SweepBound.KRAMER: _symmetric(kramer_sym),
    SweepBound.ETW: lambda ch, opts: etw_sum_bound(ch).value,
    SweepBound.THM3: _searched(UpperBoundId.THM3),
    SweepBound.THM4: _searched(UpperBoundId.THM4),
    SweepBound.THM5: _searched(UpperBoundId.THM5),
    SweepBound.BEST_UPPER: lambda ch, opts: best_upper(ch, opts).value,
    SweepBound.HK: _symmetric(hk_sum),
    SweepBound.HK_FIXED_A: _symmetric(hk_lower_fixed_a),
    SweepBound.SHK: _symmetric(r_shk),
    SweepBound.TDM: _symmetric(lambda power, g: r_tdm(power)),
    SweepBound.TIN: _symmetric(r_tin),
    SweepBound.UNDERLINE_R: _symmetric(underline_r),
}


def evaluate_bound(name: str, ch: ChannelParams, opts: SearchOptions) -> float:
    """求一个界列的值，输入超出定义域时返回 nan"""
    try:
        return float(BOUND_EVALUATORS[SweepBound(name)](ch, opts))
    except DomainError as e:
        logger.debug(f"{name} 在 {ch.to_dict()} 处无定义: {e}")
        return math.nan


class GridPoint(NamedTuple):
    power: float
    g2: float
    alpha: float


class SweepSpec(BaseModel):
    """扫描规格：功率（或 SNR）与 g²（或 α）的范围、界列、信道类型与输出"""
    p: Optional[str] = None
    snr_db: Optional[str] = None
    g2: Optional[str] = None
    alpha: Optional[str] = None
    bounds: str = "all"
    mode: ChannelKind = ChannelKind.REAL
    output: Optional[str] = None
    fmt: str = "csv"

    @model_validator(mode="after")
    def _exactly_one_axis(self) -> "SweepSpec":
        if (self.p is None) == (self.snr_db is None):
            raise ValueError("必须且只能给出 --p 与 --snr-db 之一")
        if (self.g2 is None) == (self.alpha is None):
            raise ValueError("必须且只能给出 --g2 与 --alpha 之一")
        if self.fmt not in OUTPUT_FORMATS:
            raise ValueError(f"未知的输出格式: {self.fmt}")
        return self

    @classmethod
    def build(cls, **values) -> "SweepSpec":
        """构造并把校验错误转为 UsageError"""
        try:
            return cls(**values)
        except ValidationError as e:
            raise UsageError("; ".join(err["msg"] for err in e.errors()))

    def powers(self) -> np.ndarray:
        if self.p is not None:
            values = parse_range(self.p, "--p")
        else:
            values = np.array([db_to_power(x) for x in parse_range(self.snr_db, "--snr-db")])
        if np.any(values <= 0):
            raise UsageError("功率必须为正")
        return values

    def grid(self) -> List[GridPoint]:
        """P 为外层、g²（或 α）为内层的网格点"""
        points = []
        for power in self.powers():
            power = float(power)
            if self.g2 is not None:
                for g2 in parse_range(self.g2, "--g2"):
                    if g2 < 0:
                        raise UsageError(f"g² 不能为负: {g2}")
                    alpha = g2_to_alpha(g2, power) if power > 1 and g2 > 0 else math.nan
                    points.append(GridPoint(power, float(g2), alpha))
            else:
                if not power > 1:
                    raise UsageError("按 α 扫描要求 P > 1")
                for alpha in parse_range(self.alpha, "--alpha"):
                    points.append(GridPoint(power, alpha_to_g2(alpha, power), float(alpha)))
        return points

    def bound_names(self) -> List[str]:
        return parse_name_list(self.bounds, BOUND_NAMES, "bounds")


def _regime(power: float, g2: float) -> str:
    try:
        return classify(power, math.sqrt(g2)).regime.value
    except DomainError:
        return "undefined"


def sweep_row(point: GridPoint, names: Sequence[str], kind: ChannelKind, opts: SearchOptions) -> Dict[str, Any]:
    """一个网格点的所有界值"""
    row: Dict[str, Any] = {"P": point.power, "g2": point.g2, "alpha": point.alpha}
    ch = ChannelParams.from_g2(point.power, point.g2, kind)
    for name in names:
        row[name] = evaluate_bound(name, ch, opts)
    row["regime"] = _regime(point.power, point.g2)
    return row


def sweep_rows(spec: SweepSpec, opts: Optional[SearchOptions] = None, workers: Optional[int] = None) -> List[Dict[str, Any]]:
    """
    并发计算扫描表，按网格顺序返回

    Args:
        spec: 扫描规格
        opts: 参数搜索选项
        workers: 工作线程数上限

    Returns:
        数据行列表
    """
    opts = opts or SearchOptions()
    names = spec.bound_names()
    grid = spec.grid()
    total = len(grid)
    logger.info(f"开始扫描: {total} 个网格点，{len(names)} 个界")

    def handler(item):
        index, point = item
        slog.log_sweep_row(index, total)
        return sweep_row(point, names, spec.mode, opts)

    executor = SweepExecutor(handler, worker_count=workers)
    rows = executor.run_sync(list(enumerate(grid)))
    logger.info(f"扫描完成: {executor.get_statistics()}")
    return rows


def sweep_columns(spec: SweepSpec) -> List[str]:
    return ["P", "g2", "alpha"] + spec.bound_names() + ["regime"]


GAP_COLUMNS = (
    "P", "g2", "alpha", "regime",
    "delta", "delta_ceiling", "delta_regime_ok",
    "delta_inf",
    "high_snr_rate", "high_snr_ratio", "high_snr_ratio_approx", "high_snr_subregime", "high_snr_regime_ok",
)


def gap_row(point: GridPoint) -> Dict[str, Any]:
    """一个网格点的速率差与高信噪比刻画"""
    g = math.sqrt(point.g2)
    row: Dict[str, Any] = {
        "P": point.power, "g2": point.g2, "alpha": point.alpha, "regime": _regime(point.power, point.g2)
    }
    try:
        report = delta_gap(point.power, g)
        row.update(delta=report.delta, delta_ceiling=report.ceiling, delta_regime_ok=report.regime_ok)
    except DomainError:
        row.update(delta=math.nan, delta_ceiling=math.nan, delta_regime_ok=False)
    try:
        row["delta_inf"] = delta_inf(g)
    except DomainError:
        row["delta_inf"] = math.nan
    try:
        snr = high_snr_characterization(point.power, g)
        row.update(
            high_snr_rate=snr.rate,
            high_snr_ratio=math.nan if snr.ratio is None else snr.ratio,
            high_snr_ratio_approx=math.nan if snr.ratio_approx is None else snr.ratio_approx,
            high_snr_subregime=snr.subregime,
            high_snr_regime_ok=snr.regime_ok,
        )
    except DomainError:
        row.update(
            high_snr_rate=math.nan, high_snr_ratio=math.nan, high_snr_ratio_approx=math.nan,
            high_snr_subregime="", high_snr_regime_ok=False,
        )
    return row


def gap_rows(spec: SweepSpec) -> List[Dict[str, Any]]:
    return [gap_row(point) for point in spec.grid()]


REGION_COLUMNS = ("region", "R1", "R2")


def region_rows(ch: ChannelParams, names: Sequence[str], opts: Optional[RegionOptions] = None) -> List[Dict[str, Any]]:
    """
    依次追踪各区域边界，输出按区域分段

    Args:
        ch: 信道
        names: 区域名，取自 etw / thm9_thm1 / thm10_thm5 / tdm_inner
        opts: 区域选项

    Returns:
        数据行列表
    """
    rows = []
    for name in names:
        boundary = trace_region(name, ch, opts)
        logger.info(f"区域 {name}: {len(boundary.points)} 个边界点，R2 步长 {boundary.resolution:.6g}")
        rows.extend({"region": name, **point} for point in boundary.to_rows())
    return rows


def region_names(text: str) -> List[str]:
    return parse_name_list(text, REGION_NAMES, "regions")


def _json_value(value: Any, digits: int) -> Any:
    if isinstance(value, (bool, str)) or value is None:
        return value
    value = float(value)
    if not math.isfinite(value):
        return format_float(value, digits)
    return float(format_float(value, digits))


def write_rows(
    rows: Iterable[Dict[str, Any]],
    columns: Sequence[str],
    fmt: str = "csv",
    output: Optional[str] = None,
    digits: int = 12,
):
    """
    以固定列顺序写出表格

    Args:
        rows: 数据行
        columns: 列顺序（CSV 表头）
        fmt: csv 或 json
        output: 输出文件路径，None 表示标准输出
        digits: 浮点有效数字位数
    """
    if fmt not in OUTPUT_FORMATS:
        raise UsageError(f"未知的输出格式: {fmt}")
    rows = list(rows)
    stream = open(output, "w", encoding="utf-8", newline="") if output else sys.stdout
    try:
        if fmt == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_float(row.get(col), digits) for col in columns])
        else:
            records = [{col: _json_value(row.get(col), digits) for col in columns} for row in rows]
            stream.write(json.dumps(records, indent=2, ensure_ascii=False))
            stream.write("\n")
    finally:
        if output:
            stream.close()
    if output:
        logger.info(f"已写出 {len(rows)} 行到 {output}")
