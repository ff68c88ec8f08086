"""
速率差与高信噪比分析测试
"""

import math

import numpy as np
import pytest

from src.analysis import (
    LOW_G2,
    Regime,
    alpha_to_g2,
    bound_offset_gap,
    classify,
    delta_gap,
    delta_inf,
    g2_to_alpha,
    gdof_symmetric,
    high_snr_characterization,
    hk_offset_gap,
    max_gap_on_grid,
    moderate_lower_edge,
    offset_crossing_g2,
    offset_rate_gap,
    power_offset,
    r_sym_infinity,
)
from src.bounds.lower import underline_r
from src.bounds.upper import kramer_sym, r_sym_star
from src.core import DomainError
from src.utils.logger import setup_logging

# 设置测试日志
setup_logging(level="DEBUG")

HIGH_POWERS = [1e5, 1e6, 1e7, 1e8, 1e9]


class TestRegimes:
    """干扰区间测试"""

    def test_alpha_conversion(self):
        """测试 g² 与 α 互换"""
        assert g2_to_alpha(0.1, 100.0) == pytest.approx(0.5)
        assert alpha_to_g2(0.5, 100.0) == pytest.approx(0.1)
        assert alpha_to_g2(g2_to_alpha(0.37, 250.0), 250.0) == pytest.approx(0.37)

    def test_alpha_needs_power_above_one(self):
        """测试 P ≤ 1"""
        with pytest.raises(DomainError):
            g2_to_alpha(0.5, 1.0)

    @pytest.mark.parametrize("g2,expected", [
        (0.5, Regime.MODERATE),
        (1.5, Regime.STRONG),
        (1e-4, Regime.NOISY),
        (0.15, Regime.WEAK_NON_MODERATE),
    ])
    def test_classify(self, g2, expected):
        """测试 P = 100 时的区间划分"""
        label = classify(100.0, math.sqrt(g2))

        assert label.regime == expected
        assert label.g2 == pytest.approx(g2)

    def test_classify_low_power_has_no_alpha(self):
        """测试 P ≤ 1 时不给出 α"""
        assert classify(0.5, 0.5).alpha is None

    def test_classify_zero_gain(self):
        """测试 g = 0"""
        with pytest.raises(DomainError):
            classify(100.0, 0.0)

    def test_moderate_lower_edge(self):
        """测试中等干扰区间下端"""
        assert moderate_lower_edge(8.0) == pytest.approx(0.5)
        assert moderate_lower_edge(1e9) == pytest.approx(LOW_G2)

    @pytest.mark.parametrize("alpha,expected", [
        (0.0, 1.0), (0.5, 0.5), (2.0 / 3.0, 2.0 / 3.0), (1.0, 0.5), (2.0, 1.0), (3.0, 1.0),
    ])
    def test_gdof_w_curve(self, alpha, expected):
        """测试 W 形曲线"""
        assert gdof_symmetric(alpha) == pytest.approx(expected)


class TestDeltaGap:
    """速率差测试"""

    @pytest.mark.parametrize("g2,expected", [(0.086, 0.098), (0.405, 0.021), (0.835, 0.063)])
    def test_delta_inf_values(self, g2, expected):
        """测试分段点处的 Δ∞"""
        assert delta_inf(math.sqrt(g2)) == pytest.approx(expected, abs=5e-4)

    @pytest.mark.parametrize("g2", [0.25, 0.5])
    def test_delta_inf_zeros(self, g2):
        """测试 Δ∞ 的零点"""
        assert delta_inf(math.sqrt(g2)) == pytest.approx(0.0, abs=1e-12)

    def test_delta_inf_nonnegative(self):
        """测试 Δ∞ 非负"""
        assert all(delta_inf(math.sqrt(g2)) >= -1e-12 for g2 in np.linspace(0.01, 1.0, 100))

    def test_delta_inf_domain(self):
        """测试定义域"""
        with pytest.raises(DomainError):
            delta_inf(1.1)
        with pytest.raises(DomainError):
            delta_inf(0.0)

    def test_delta_equals_ceiling_at_low_power(self):
        """测试 P < 23.3 时速率差等于解析上限"""
        report = delta_gap(10.0, math.sqrt(0.6))

        assert report.delta == pytest.approx(report.ceiling, abs=1e-12)
        assert report.regime_ok

    def test_delta_below_ceiling_at_high_power(self):
        """测试 P ≥ 23.3 时速率差不超过解析上限"""
        for g2 in (0.3, 0.5, 0.7, 0.95):
            report = delta_gap(1000.0, math.sqrt(g2))
            assert report.delta <= report.ceiling + 1e-12

    def test_delta_bounded_on_moderate_regime(self):
        """测试中等干扰区间上 Δ ≤ 0.125"""
        for power in (30.0, 100.0, 1000.0):
            g2_values = [g2 for g2 in np.arange(0.01, 1.0, 0.005) if moderate_lower_edge(power) < g2 < 1.0]
            worst, _ = max_gap_on_grid(
                lambda p, g: delta_gap(p, g).delta, power, g2_values
            )
            assert worst <= 0.125 + 1e-3

    def test_out_of_regime_flagged(self):
        """测试超出适用范围只做标记"""
        assert not delta_gap(100.0, math.sqrt(0.1)).regime_ok


class TestHighSnr:
    """高信噪比刻画测试"""

    def test_low_gain_subregime(self):
        """测试 g² < 0.086 的子区间"""
        g = math.sqrt(0.05)
        report = high_snr_characterization(1e6, g)

        assert report.subregime == "H0"
        assert report.regime_ok
        assert report.rate == pytest.approx(r_sym_star(1e6, g) + 0.5 * math.log2(2 * g + 1 / g) - 1)
        assert report.ratio_approx == pytest.approx(1.0 - g2_to_alpha(0.05, 1e6) / 2.0)

    def test_high_gain_subregime(self):
        """测试 g² ≥ 0.086 的子区间"""
        g = math.sqrt(0.5)
        report = high_snr_characterization(1e6, g)

        assert report.subregime == "H1"
        assert report.rate == pytest.approx(r_sym_star(1e6, g))

    def test_out_of_regime(self):
        """测试超出适用范围"""
        assert not high_snr_characterization(100.0, math.sqrt(0.1)).regime_ok

    def test_subregimes_agree_at_boundary(self):
        """测试 g² = 0.086 处两个子区间的表达式一致"""
        g = math.sqrt(LOW_G2)

        assert 0.5 * math.log2(2.0 * g + 1.0 / g) == pytest.approx(1.0, abs=1e-12)
        below = high_snr_characterization(1e6, math.sqrt(LOW_G2 - 1e-9))
        above = high_snr_characterization(1e6, math.sqrt(LOW_G2 + 1e-9))

        assert below.subregime == "H0"
        assert above.subregime == "H1"
        assert below.rate == pytest.approx(above.rate, abs=1e-6)

    @pytest.mark.parametrize("g2", [0.2, 0.5, 0.9])
    def test_r_sym_infinity_equals_r_sym_star_on_h1(self, g2):
        """测试 g² ≥ 0.086 时高信噪比下 R^∞_sym 与 R*_sym 一致"""
        g = math.sqrt(g2)

        assert high_snr_characterization(1e8, g).rate == pytest.approx(r_sym_star(1e8, g), abs=1e-12)
        assert r_sym_infinity(1e8, g) == pytest.approx(r_sym_star(1e8, g), abs=1e-6)

    def test_r_sym_infinity_not_below_lower_bound(self):
        """测试高信噪比刻画不低于分段下界"""
        g = math.sqrt(0.3)

        assert r_sym_infinity(1e4, g) >= underline_r(1e4, g)


class TestPowerOffset:
    """功率偏移测试"""

    def test_r_sym_star_offset(self):
        """测试 R*_sym 的功率偏移收敛到 −log₂(g + 1/g)"""
        g = math.sqrt(0.5)
        offset = power_offset(r_sym_star, g, HIGH_POWERS)

        assert offset.converged
        assert offset.last == pytest.approx(-math.log2(g + 1 / g), abs=1e-6)
        assert offset.extrapolated == pytest.approx(offset.last, abs=1e-6)
        assert len(offset.sequence) == len(HIGH_POWERS)

    def test_needs_three_powers(self):
        """测试功率序列长度"""
        with pytest.raises(DomainError):
            power_offset(r_sym_star, 0.5, [1e5, 1e6])

    def test_needs_increasing_powers(self):
        """测试功率序列递增"""
        with pytest.raises(DomainError):
            power_offset(r_sym_star, 0.5, [1e5, 1e7, 1e6])

    def test_offset_rate_gap(self):
        """测试偏移差换算为速率差"""
        assert offset_rate_gap(1.0, 2.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("g2", [0.25, 0.5])
    def test_kramer_offset_gap(self, g2):
        """测试 Kramer 界相对 R*_sym 的极限差"""
        g = math.sqrt(g2)

        assert bound_offset_gap(kramer_sym, r_sym_star, g, HIGH_POWERS) == pytest.approx(
            0.5 * math.log2(1 / g), abs=1e-3
        )

    @pytest.mark.parametrize("g2", [0.25, 0.5])
    def test_hk_offset_gap(self, g2):
        """测试 HK 固定 a 下界与 R*_sym 的极限差为 0"""
        assert hk_offset_gap(math.sqrt(g2), HIGH_POWERS) == pytest.approx(0.0, abs=1e-3)

    def test_offset_crossing(self):
        """测试推论 1 与 Kramer 界功率偏移相等的 g²"""
        crossing = offset_crossing_g2()

        assert crossing == pytest.approx(0.835, abs=5e-3)
        assert 4 * crossing ** 3 - 4 * crossing + 1 == pytest.approx(0.0, abs=1e-4)
