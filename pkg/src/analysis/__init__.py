"""
分析模块

干扰区间划分、速率差、高信噪比刻画与功率偏移
"""

from .gaps import (
    LOW_G2,
    MID_G2,
    HIGH_G2,
    Regime,
    RegimeLabel,
    DeltaReport,
    HighSnrReport,
    PowerOffset,
    classify,
    g2_to_alpha,
    alpha_to_g2,
    noisy_interference,
    moderate_lower_edge,
    gdof_symmetric,
    delta_gap,
    delta_ceiling,
    delta_inf,
    high_snr_characterization,
    power_offset,
    offset_rate_gap,
    bound_offset_gap,
    offset_crossing_g2,
    max_gap_on_grid,
    r_sym_infinity,
    hk_offset_gap,
)

__all__ = [
    "LOW_G2",
    "MID_G2",
    "HIGH_G2",
    "Regime",
    "RegimeLabel",
    "DeltaReport",
    "HighSnrReport",
    "PowerOffset",
    "classify",
    "g2_to_alpha",
    "alpha_to_g2",
    "noisy_interference",
    "moderate_lower_edge",
    "gdof_symmetric",
    "delta_gap",
    "delta_ceiling",
    "delta_inf",
    "high_snr_characterization",
    "power_offset",
    "offset_rate_gap",
    "bound_offset_gap",
    "offset_crossing_g2",
    "max_gap_on_grid",
    "r_sym_infinity",
    "hk_offset_gap",
]
