"""
容量域测试

测试约束模型、ETW 外界、TDM 内界与边界追踪
"""

import math

import numpy as np
import pytest

from src.core import ChannelParams, DomainError, GenieParams
from src.region.rate_region import (
    ConstraintKind,
    RegionConstraint,
    RegionOptions,
    etw_region,
    intersect_and_trace,
    linear,
    max_sum_rate,
    outer_bound_thm10,
    region_contains,
    tdm_inner_region,
    thm9_ceiling,
    thm9_constraints,
    trace_region,
)
from src.search.param_search import SearchOptions
from src.utils.config import Config
from src.utils.logger import setup_logging

# 设置测试日志
setup_logging(level="DEBUG")


@pytest.fixture
def channel() -> ChannelParams:
    """P = 7、g² = 0.2"""
    return ChannelParams.from_g2(7.0, 0.2)


@pytest.fixture
def quick() -> RegionOptions:
    return RegionOptions(
        points=60, thm9_knots=4, search=SearchOptions(grid_points_per_dim=4, refine_iters=40, restarts=1)
    )


class TestRegionConstraint:
    """约束模型测试"""

    def test_linear_ceiling(self):
        """测试加权和约束的 R1 上限"""
        c = linear("sum", 1.0, 2.0, 3.0)

        assert c.ceiling_r1(1.0) == pytest.approx(1.0)
        assert c.slack(1.0, 1.0) == pytest.approx(0.0)

    def test_r2_only_constraint(self):
        """测试只约束 R2 的约束"""
        c = linear("r2", 0.0, 1.0, 1.0)

        assert c.ceiling_r1(0.5) == math.inf
        assert c.ceiling_r1(1.5) == -math.inf

    def test_invalid_weights(self):
        """测试系数全为零"""
        with pytest.raises(DomainError):
            linear("bad", 0.0, 0.0, 1.0)

    def test_implicit_needs_evaluator(self):
        """测试隐式约束缺少求值函数"""
        with pytest.raises(DomainError):
            RegionConstraint(kind=ConstraintKind.IMPLICIT, label="f")

    def test_implicit_r2_axis_inverted(self):
        """测试 R2 ≤ f(R1) 反解 R1 上限"""
        c = RegionConstraint(
            kind=ConstraintKind.IMPLICIT, label="f", evaluator=lambda r1: 1.0 - r1, axis="r2", domain_max=1.0
        )

        assert c.ceiling_r1(0.25) == pytest.approx(0.75)
        assert c.slack(0.5, 0.25) == pytest.approx(0.25)


class TestEtwRegion:
    """ETW 外界测试"""

    def test_seven_constraints(self, channel):
        """测试七个约束"""
        constraints = etw_region(channel)

        assert len(constraints) == 7
        assert all(c.kind == ConstraintKind.LINEAR_WEIGHTED for c in constraints)

    def test_only_unit_genie(self, channel):
        """测试只接受单位精灵噪声"""
        with pytest.raises(DomainError):
            etw_region(channel, GenieParams(sigma_n1=0.5))

    def test_strong_interference(self):
        """测试强干扰"""
        with pytest.raises(DomainError):
            etw_region(ChannelParams.from_g2(7.0, 1.5))

    def test_trace_shape(self, channel):
        """测试边界点数与单调性"""
        boundary = intersect_and_trace(etw_region(channel), points=50, name="etw")

        assert len(boundary.points) == 50
        assert boundary.r2[0] == 0.0
        assert boundary.r2[-1] == pytest.approx(1.5)
        assert boundary.r1[0] == pytest.approx(1.5)
        assert np.all(np.diff(boundary.r1) <= 1e-12)

    def test_grid_refinement(self, channel):
        """测试网格加密后公共点上取值一致"""
        coarse = intersect_and_trace(etw_region(channel), points=11)
        fine = intersect_and_trace(etw_region(channel), points=21)

        np.testing.assert_allclose(coarse.r1, fine.r1[::2], atol=1e-6)

    def test_symmetric_boundary(self, channel):
        """测试对称信道的边界关于 R1 = R2 对称"""
        boundary = intersect_and_trace(etw_region(channel), points=41)
        constraints = etw_region(channel)

        for r1, r2 in boundary.points:
            assert region_contains(constraints, r2 - 1e-9, r1 - 1e-9, tol=1e-9)

    def test_trace_stops_at_reachable_r2(self):
        """测试单用户 R2 上限处 R1 不可达时网格截止于可达的最大 R2"""
        constraints = [linear("r1", 1.0, 0.0, 1.0), linear("r2", 0.0, 1.0, 2.0), linear("sum", 1.0, 1.0, 1.5)]
        boundary = intersect_and_trace(constraints, points=31)

        assert len(boundary.points) == 31
        assert boundary.r2[-1] == pytest.approx(1.5, abs=1e-8)
        assert boundary.r1[-1] == pytest.approx(0.0, abs=1e-8)
        for r1, r2 in boundary.points:
            assert min(c.slack(r1, r2) for c in constraints) >= -1e-8

    def test_trace_stops_where_implicit_becomes_unreachable(self):
        """测试隐式约束给出 −inf 上限时不输出 R1 = 0 的假点"""
        implicit = RegionConstraint(
            kind=ConstraintKind.IMPLICIT, label="f", evaluator=lambda r1: 1.0 - r1, axis="r2", domain_max=1.0
        )
        constraints = [linear("r1", 1.0, 0.0, 1.0), linear("r2", 0.0, 1.0, 2.0), implicit]
        boundary = intersect_and_trace(constraints, points=21)

        assert boundary.r2[-1] == pytest.approx(1.0, abs=1e-8)
        assert np.all(boundary.r2 <= 1.0 + 1e-9)

    def test_empty_intersection(self):
        """测试 R2 = 0 处也没有可达的 R1"""
        constraints = [linear("r1", 1.0, 0.0, -0.5), linear("r2", 0.0, 1.0, 1.0)]
        with pytest.raises(DomainError):
            intersect_and_trace(constraints, points=10)

    def test_needs_single_user_constraints(self):
        """测试缺少单用户约束"""
        with pytest.raises(DomainError):
            intersect_and_trace([linear("sum", 1.0, 1.0, 2.0)], points=10)


class TestTdmInner:
    """TDM 内界测试"""

    def test_end_points(self):
        """测试端点为单用户速率"""
        boundary = tdm_inner_region(7.0, points=20)

        assert boundary.points[0] == pytest.approx((1.5, 0.0))
        assert boundary.points[-1][0] == pytest.approx(0.0, abs=1e-9)
        assert boundary.points[-1][1] == pytest.approx(1.5)

    def test_inside_etw(self, channel):
        """测试 TDM 内界位于 ETW 外界内"""
        constraints = etw_region(channel)
        boundary = tdm_inner_region(7.0, points=40)

        assert all(region_contains(constraints, r1, r2) for r1, r2 in boundary.points)

    def test_max_sum_rate(self):
        """测试最大和速率为 ½log₂(1+2P)"""
        boundary = tdm_inner_region(7.0, points=401)

        assert max_sum_rate(boundary) == pytest.approx(0.5 * math.log2(15.0), abs=1e-4)

    def test_nonpositive_power(self):
        """测试非正功率"""
        with pytest.raises(DomainError):
            tdm_inner_region(0.0)


class TestOuterBounds:
    """精灵辅助外界测试"""

    def test_thm9_ceiling_vectorized(self, channel):
        """测试定理 9 上限对 κ 数组逐点求值"""
        sigmas = np.array([0.6, 1.0])
        k = GenieParams.unit().with_values(sigma_w1=sigmas, sigma_w2=sigmas)
        values = thm9_ceiling(channel, k, 0.5)

        assert values.shape == (2,)
        assert values[1] == pytest.approx(thm9_ceiling(channel, GenieParams.unit(), 0.5))

    def test_thm9_fixed_params(self, channel):
        """测试给定可行 κ 时返回两侧约束"""
        constraints = thm9_constraints(channel, GenieParams.unit())

        assert [c.axis for c in constraints] == ["r1", "r2"]

    def test_thm9_infeasible_params(self):
        """测试不可行 κ"""
        with pytest.raises(DomainError):
            thm9_constraints(ChannelParams.from_g2(7.0, 0.8), GenieParams.unit())

    def test_thm10_region_inside_etw_single_user(self, channel, quick):
        """测试外界 2 的边界不超出单用户速率"""
        boundary = intersect_and_trace(outer_bound_thm10(channel, quick), quick.points, name="thm10_thm5")

        assert np.all(boundary.r1 <= 1.5 + 1e-9)
        assert np.all(np.diff(boundary.r1) <= 1e-9)

    def test_outer_bounds_tighter_than_etw(self, channel, quick):
        """测试两个外界在部分边界上严格位于 ETW 之内"""
        etw = trace_region("etw", channel, quick)
        thm9 = trace_region("thm9_thm1", channel, quick)
        thm10 = trace_region("thm10_thm5", channel, quick)

        np.testing.assert_allclose(thm9.r2, etw.r2)
        np.testing.assert_allclose(thm10.r2, etw.r2)
        assert np.all(thm9.r1 <= etw.r1 + 1e-9)
        assert np.max(etw.r1 - thm9.r1) > 0.01
        assert np.max(etw.r1 - thm10.r1) > 0.01

    def test_tdm_inside_all_outer_bounds(self, channel, quick):
        """测试 TDM 内界位于各外界之内"""
        inner = tdm_inner_region(7.0, quick.points)
        for name in ("etw", "thm9_thm1", "thm10_thm5"):
            outer = trace_region(name, channel, quick)
            for (r1_in, r2_in), (r1_out, r2_out) in zip(inner.points, outer.points):
                assert r2_in == pytest.approx(r2_out)
                assert r1_in <= r1_out + 1e-9

    def test_unknown_region(self, channel):
        """测试未知区域名"""
        with pytest.raises(DomainError):
            trace_region("nope", channel)

    def test_options_from_config(self, tmp_path):
        """测试从配置构造区域选项"""
        path = tmp_path / "config.yaml"
        path.write_text("region:\n  points: 50\n  search:\n    restarts: 1\n", encoding="utf-8")
        opts = RegionOptions.from_config(Config(str(path)))

        assert opts.points == 50
        assert opts.search.restarts == 1
