"""
引理数值验证测试

测试混合熵积分、高斯实例的等号与混合实例的不等式方向
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.core import ChannelKind, DomainError
from src.core.entropy import gaussian_entropy
from src.lemmas import (
    GaussianTriple,
    Lemma2Instance,
    MixtureSpec,
    ProbeResult,
    QuadratureOptions,
    corollary7_gap,
    lemma1_gap,
    lemma1_inequality_probe,
    lemma2_gap,
    lemma2_mixture_probe,
    mixture_entropy,
    mixture_entropy_1d,
    random_corollary7_probes,
    random_gaussian_triple,
    random_lemma1_probes,
    random_lemma2_instances,
    random_lemma2_probes,
)
from src.utils.config import Config
from src.utils.logger import setup_logging

# 设置测试日志
setup_logging(level="DEBUG")


class TestQuadrature:
    """混合熵积分测试"""

    def test_gaussian_exact(self):
        """测试单分量时与闭式一致"""
        result = mixture_entropy_1d(MixtureSpec.gaussian(2.0, mean=1.0))

        assert result.converged
        assert result.value == pytest.approx(gaussian_entropy(4.0), abs=1e-9)

    def test_extra_noise(self):
        """测试附加独立噪声"""
        result = mixture_entropy_1d(MixtureSpec.gaussian(1.0), extra_var=3.0)

        assert result.value == pytest.approx(gaussian_entropy(4.0), abs=1e-9)

    def test_complex_gaussian(self):
        """测试复高斯分量"""
        result = mixture_entropy([1.0], [0.0], [2.0], kind=ChannelKind.COMPLEX)

        assert result.value == pytest.approx(gaussian_entropy(2.0, ChannelKind.COMPLEX), abs=1e-9)

    def test_two_dimensional_gaussian(self):
        """测试二维相关高斯"""
        cov = np.array([[2.0, 0.6], [0.6, 1.0]])
        result = mixture_entropy([1.0], [[0.0, 0.0]], [cov])
        expected = 0.5 * (2 * math.log2(2 * math.pi * math.e) + math.log2(np.linalg.det(cov)))

        assert result.value == pytest.approx(expected, abs=1e-9)

    def test_separated_components_add_one_bit(self):
        """测试相距很远的等权两分量比单分量多 1 bit"""
        result = mixture_entropy_1d(MixtureSpec.symmetric(3.0, 0.5))

        assert result.value == pytest.approx(gaussian_entropy(0.25) + 1.0, abs=1e-6)

    def test_below_gaussian_of_same_variance(self):
        """测试混合熵不超过同方差高斯的熵"""
        spec = MixtureSpec(weights=(0.3, 0.7), means=(-1.0, 0.8), stds=(0.6, 1.1))

        assert mixture_entropy_1d(spec).value <= gaussian_entropy(spec.variance)

    def test_dimension_limit(self):
        """测试实维数上限"""
        with pytest.raises(DomainError):
            mixture_entropy([1.0], [[0.0, 0.0, 0.0]], [np.eye(3)])

    def test_mixture_validation(self):
        """测试混合参数校验"""
        with pytest.raises(DomainError):
            MixtureSpec(weights=(0.3, 0.3), means=(0.0, 1.0), stds=(1.0, 1.0))
        with pytest.raises(DomainError):
            MixtureSpec(weights=(1.0,), means=(0.0,), stds=(0.0,))

    def test_mixture_moments(self):
        """测试混合的均值与方差"""
        spec = MixtureSpec.symmetric(2.0, 0.5)

        assert spec.mean == pytest.approx(0.0)
        assert spec.variance == pytest.approx(4.25)

    def test_options_validation(self):
        """测试阶数范围校验"""
        with pytest.raises(ValidationError):
            QuadratureOptions(min_order=64, max_order=32)

    def test_options_from_config(self, tmp_path):
        """测试从配置节构造"""
        path = tmp_path / "config.yaml"
        path.write_text("lemma_lab:\n  quad_rel_tol: 1.0e-6\n  quad_max_order: 128\n", encoding="utf-8")
        opts = QuadratureOptions.from_config(Config(str(path)))

        assert opts.rel_tol == 1e-6
        assert opts.max_order == 128
        assert opts.min_order == 32


class TestLemma1:
    """条件最坏加性噪声引理测试"""

    def test_gaussian_equality(self):
        """测试高斯实例等号成立"""
        assert lemma1_gap(GaussianTriple.from_parts(2.0, 1.0, 1.5, 0.5)) == pytest.approx(0.0, abs=1e-9)

    def test_gaussian_equality_without_u(self):
        """测试 U 退化时按无条件处理"""
        assert lemma1_gap(GaussianTriple.from_parts(2.0, 1.0)) == pytest.approx(0.0, abs=1e-9)

    def test_random_gaussian_triples(self):
        """测试随机高斯实例"""
        for index in range(20):
            assert lemma1_gap(random_gaussian_triple(7, index)) == pytest.approx(0.0, abs=1e-9)

    def test_triple_requires_independent_z(self):
        """测试 Z 必须与 U 独立"""
        cov = np.array([[1.0, 1.0, 0.3], [1.0, 3.0, 0.2], [0.3, 0.2, 1.0]])
        with pytest.raises(DomainError):
            GaussianTriple(cov)

    def test_triple_parts(self):
        """测试三元组分量"""
        t = GaussianTriple.from_parts(2.0, 1.0, 1.5, 0.5)

        assert (t.var_x, t.var_z, t.var_u, t.cov_xu) == pytest.approx((2.0, 1.0, 1.5, 0.5))

    def test_gaussian_probe_is_tight(self):
        """测试 X 为高斯时混合探针的差值为 0"""
        result = lemma1_inequality_probe(MixtureSpec.gaussian(1.2), 0.7, 0.8, 1.0)

        assert result.converged
        assert result.gap == pytest.approx(0.0, abs=1e-7)

    @pytest.mark.parametrize("coupling", [0.0, 0.7, -1.2])
    def test_mixture_direction(self, coupling):
        """测试混合分布 X 时不等式方向成立"""
        result = lemma1_inequality_probe(MixtureSpec.symmetric(1.5, 0.6), coupling, 0.8, 1.0)

        assert result.gap >= -1e-6

    def test_deterministic_u_rejected(self):
        """测试 U 为 X 的确定函数"""
        with pytest.raises(DomainError):
            lemma1_inequality_probe(MixtureSpec.gaussian(1.0), 1.0, 0.0, 1.0)

    def test_random_probes(self):
        """测试随机混合探针"""
        probes = random_lemma1_probes(5, seed=3)

        assert all(p.holds() is not False for p in probes)


class TestCorollary7:
    """推论测试"""

    def test_gaussian_equality(self):
        """测试 X 为高斯时等号成立"""
        result = corollary7_gap(0.5, 1.0, 0.0, MixtureSpec.gaussian(1.3))

        assert result.gap == pytest.approx(0.0, abs=1e-9)

    def test_mixture_direction(self):
        """测试混合分布 X 时方向成立"""
        result = corollary7_gap(0.4, 1.2, 0.3, MixtureSpec.symmetric(2.0, 0.5))

        assert result.gap >= -1e-6

    def test_requires_larger_z(self):
        """测试 σ_Z² ≥ σ_W²"""
        with pytest.raises(DomainError):
            corollary7_gap(1.0, 0.5, 0.0, MixtureSpec.gaussian(1.0))

    def test_random_probes(self):
        """测试随机混合探针"""
        assert all(p.holds() is not False for p in random_corollary7_probes(5, seed=3))


class TestLemma2:
    """条件熵差不等式测试"""

    def test_condition_enforced(self):
        """测试 σ_V² ≥ σ²_(Z−W)"""
        with pytest.raises(DomainError):
            Lemma2Instance(1.0, 1.0, 1.0, 0.0, 0.5)

    def test_tilde_v_variance(self):
        """测试 Ṽ 的方差"""
        inst = Lemma2Instance(1.0, 1.0, 1.0, 0.5, 2.0, rho_zw=0.5)

        assert inst.var_z_minus_w == pytest.approx(0.75)
        assert inst.tilde_v_var == pytest.approx(3.25)

    def test_gaussian_equality_case(self):
        """测试 Y、W 退化时等号成立"""
        assert lemma2_gap(Lemma2Instance(1.5, 0.0, 1.0, 0.0, 1.0)).gap == pytest.approx(0.0, abs=1e-9)

    def test_gaussian_direction(self):
        """测试随机高斯实例方向成立"""
        assert min(r.gap for r in random_lemma2_instances(500, seed=11)) >= -1e-9

    def test_mixture_probe(self):
        """测试混合分布 X 时方向成立"""
        inst = Lemma2Instance(1.0, 0.8, 1.0, 0.6, 1.2, rho_zw=0.3)
        result = lemma2_mixture_probe(MixtureSpec.symmetric(1.5, 0.6), inst)

        assert result.gap >= -1e-6

    def test_random_mixture_probes(self):
        """测试随机混合探针"""
        assert all(p.holds() is not False for p in random_lemma2_probes(5, seed=3))


class TestProbeResult:
    """探测结果测试"""

    def test_unconverged_has_no_verdict(self):
        """测试积分未收敛时不下结论"""
        assert ProbeResult(gap=-1.0, left=0.0, right=-1.0, converged=False).holds() is None

    def test_tolerance(self):
        """测试容差"""
        result = ProbeResult(gap=-1e-7, left=0.0, right=-1e-7)

        assert result.holds()
        assert not result.holds(tol=1e-8)
