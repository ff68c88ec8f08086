"""
容量界模块

和速率上界（闭式与精灵辅助）以及 TDM / TIN / HK 可达下界
"""

from .upper import (
    r_sym_star,
    kramer_sym,
    thm6_var_n1,
    thm6_branches,
    thm6_simplified,
    cor1_gamma,
    cor1_rbar,
    etw_constraint_values,
    etw_sum_bound,
    r0_terms,
    evaluate_genie_bound,
    thm3_bound,
    thm4_bound,
    thm4_swapped_bound,
    thm5_bound,
    thm5_swapped_bound,
    thm3_entropy_form,
    thm4_entropy_form,
    thm5_entropy_form,
    thm10_entropy_form,
    thm5_a_step_params,
    thm5_b_step_params,
    thm5_warm_starts,
    symmetric_closed_forms,
    best_upper,
)
from .lower import (
    TDM_POWER_THRESHOLD,
    HkPoint,
    r_tdm,
    r_tin,
    in_hk_regime,
    hk_maxmin,
    hk_brute_force,
    hk_a_star,
    hk_sum,
    hk_lower_fixed_a,
    r_shk,
    underline_r,
    tdm_hk_crossing_power,
)

__all__ = [
    "r_sym_star",
    "kramer_sym",
    "thm6_var_n1",
    "thm6_branches",
    "thm6_simplified",
    "cor1_gamma",
    "cor1_rbar",
    "etw_constraint_values",
    "etw_sum_bound",
    "r0_terms",
    "evaluate_genie_bound",
    "thm3_bound",
    "thm4_bound",
    "thm4_swapped_bound",
    "thm5_bound",
    "thm5_swapped_bound",
    "thm3_entropy_form",
    "thm4_entropy_form",
    "thm5_entropy_form",
    "thm10_entropy_form",
    "thm5_a_step_params",
    "thm5_b_step_params",
    "thm5_warm_starts",
    "symmetric_closed_forms",
    "best_upper",
    "TDM_POWER_THRESHOLD",
    "HkPoint",
    "r_tdm",
    "r_tin",
    "in_hk_regime",
    "hk_maxmin",
    "hk_brute_force",
    "hk_a_star",
    "hk_sum",
    "hk_lower_fixed_a",
    "r_shk",
    "underline_r",
    "tdm_hk_crossing_power",
]
