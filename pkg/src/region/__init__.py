"""
容量域模块

外界（ETW、定理 9 与定理 1、定理 10 与定理 5）与 TDM 内界的边界追踪
"""

from .rate_region import (
    REGION_NAMES,
    ConstraintKind,
    RegionOptions,
    RegionConstraint,
    RegionBoundary,
    etw_region,
    outer_bound_etw,
    outer_bound_thm9,
    outer_bound_thm10,
    tdm_inner_region,
    intersect_and_trace,
    region_contains,
    max_sum_rate,
    trace_region,
)

__all__ = [
    "REGION_NAMES",
    "ConstraintKind",
    "RegionOptions",
    "RegionConstraint",
    "RegionBoundary",
    "etw_region",
    "outer_bound_etw",
    "outer_bound_thm9",
    "outer_bound_thm10",
    "tdm_inner_region",
    "intersect_and_trace",
    "region_contains",
    "max_sum_rate",
    "trace_region",
]
