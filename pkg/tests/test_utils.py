"""
工具模块测试

测试配置加载、环境变量替换、命令行解析辅助函数与结构化日志
"""

import math

import numpy as np
import pytest

from src.core import UsageError
from src.utils import (
    Config,
    StructuredLogger,
    db_to_power,
    format_duration,
    format_float,
    parse_name_list,
    parse_range,
)
from src.utils.logger import setup_logging

# 设置测试日志
setup_logging(level="DEBUG")


@pytest.fixture
def config_file(tmp_path):
    """写入配置文件并返回路径"""
    def write(text: str) -> str:
        path = tmp_path / "config.yaml"
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


class TestConfig:
    """配置管理测试"""

    def test_defaults_when_missing(self, tmp_path):
        """测试文件不存在时使用默认配置"""
        config = Config(str(tmp_path / "missing.yaml"))

        assert config.get("search.grid_points_per_dim") == 9
        assert config.get("lemma_lab.quad_max_order") == 256
        assert config.validate()

    def test_partial_file_keeps_defaults(self, config_file):
        """测试文件缺失的键使用默认值"""
        config = Config(config_file("search:\n  restarts: 2\n"))

        assert config.get("search.restarts") == 2
        assert config.get("search.refine_iters") == 200
        assert config.get("region.points") == 400

    def test_get_set(self, tmp_path):
        """测试点号键读写"""
        config = Config(str(tmp_path / "missing.yaml"))
        config.set("region.search.restarts", 5)
        config["sweep.float_digits"] = 8

        assert config["region.search.restarts"] == 5
        assert config.get("sweep.float_digits") == 8
        assert config.get("no.such.key", "fallback") == "fallback"
        assert "search.seed" in config

    def test_env_replacement(self, config_file, mocker):
        """测试 ${ENV} 占位符替换"""
        mocker.patch.dict("os.environ", {"GIC_TEST_LEVEL": "DEBUG"})
        config = Config(config_file('logging:\n  level: "${GIC_TEST_LEVEL}"\n'))

        assert config.get("logging.level") == "DEBUG"

    def test_unset_env_becomes_none(self, config_file):
        """测试未设置的环境变量替换为 None"""
        config = Config(config_file('logging:\n  file: "${GIC_TEST_UNSET_VARIABLE}"\n'))

        assert config.get("logging.file") is None

    def test_config_path_from_env(self, config_file, mocker):
        """测试 GIC_BOUNDS_CONFIG 指定配置文件"""
        path = config_file("verify:\n  seed: 7\n")
        mocker.patch.dict("os.environ", {"GIC_BOUNDS_CONFIG": path})

        assert Config().get("verify.seed") == 7

    def test_sweep_threads(self, tmp_path, mocker):
        """测试线程数：环境变量优先"""
        config = Config(str(tmp_path / "missing.yaml"))
        mocker.patch.dict("os.environ", {"GIC_BOUNDS_THREADS": ""})
        assert config.sweep_threads() is None

        config.set("sweep.threads", 2)
        assert config.sweep_threads() == 2

        mocker.patch.dict("os.environ", {"GIC_BOUNDS_THREADS": "3"})
        assert config.sweep_threads() == 3

        mocker.patch.dict("os.environ", {"GIC_BOUNDS_THREADS": "many"})
        assert config.sweep_threads() is None

    @pytest.mark.parametrize("key,value", [
        ("search.grid_points_per_dim", 1),
        ("channel.kind", "quantum"),
        ("sweep.threads", 0),
        ("search.tol_bits", None),
    ])
    def test_validate_rejects(self, tmp_path, mocker, key, value):
        """测试配置验证失败"""
        mocker.patch.dict("os.environ", {"GIC_BOUNDS_THREADS": ""})
        config = Config(str(tmp_path / "missing.yaml"))
        config.set(key, value)

        assert not config.validate()

    def test_invalid_yaml_falls_back(self, config_file):
        """测试 YAML 解析失败时回退到默认配置"""
        config = Config(config_file("search: [unclosed\n"))

        assert config.get("search.grid_points_per_dim") == 9

    def test_non_mapping_yaml_falls_back(self, config_file):
        """测试顶层不是映射时回退到默认配置"""
        config = Config(config_file("- 1\n- 2\n"))

        assert config.get("region.points") == 400

    def test_set_creates_sections(self, tmp_path):
        """测试设置时自动创建中间节"""
        config = Config(str(tmp_path / "missing.yaml"))
        config.set("extra.nested.value", 1.5)

        assert config.get_section("extra") == {"nested": {"value": 1.5}}


class TestHelpers:
    """辅助函数测试"""

    def test_parse_scalar(self):
        """测试标量"""
        np.testing.assert_array_equal(parse_range("100"), [100.0])

    def test_parse_range_inclusive(self):
        """测试范围包含端点"""
        np.testing.assert_array_equal(parse_range("1:2:0.25"), [1.0, 1.25, 1.5, 1.75, 2.0])

    def test_parse_range_rounding(self):
        """测试小步长范围无累积误差"""
        values = parse_range("0.01:1.0:0.01")

        assert len(values) == 100
        assert values[-1] == 1.0
        assert values[2] == 0.03

    @pytest.mark.parametrize("text", ["a", "1:2", "1:2:0", "2:1:0.1", "1:2:-0.5"])
    def test_parse_range_errors(self, text):
        """测试非法范围"""
        with pytest.raises(UsageError):
            parse_range(text)

    def test_parse_name_list_order(self):
        """测试按允许值的顺序输出"""
        assert parse_name_list("c, a", ("a", "b", "c")) == ["a", "c"]
        assert parse_name_list("all", ("a", "b")) == ["a", "b"]

    @pytest.mark.parametrize("text", ["", " , ", "a,d"])
    def test_parse_name_list_errors(self, text):
        """测试空列表与未知名称"""
        with pytest.raises(UsageError):
            parse_name_list(text, ("a", "b", "c"))

    @pytest.mark.parametrize("value,expected", [
        (math.nan, "nan"), (math.inf, "inf"), (-math.inf, "-inf"), (0.0, "0"), (-0.0, "0"),
        (True, "true"), (None, ""), ("moderate", "moderate"), (1e-13, "1e-13"), (2.5, "2.5"),
    ])
    def test_format_float(self, value, expected):
        """测试稳定的浮点格式"""
        assert format_float(value) == expected

    def test_format_float_digits(self):
        """测试有效数字位数"""
        assert format_float(math.pi, 4) == "3.142"

    def test_db_to_power(self):
        """测试 dB 换算"""
        assert db_to_power(30.0) == pytest.approx(1000.0)
        assert db_to_power(0.0) == 1.0

    @pytest.mark.parametrize("seconds,expected", [(0.25, "250.0毫秒"), (5.0, "5.0秒"), (120.0, "2.0分钟")])
    def test_format_duration(self, seconds, expected):
        """测试时长格式"""
        assert format_duration(seconds) == expected


class TestStructuredLogger:
    """结构化日志测试"""

    def test_criterion_failure_is_warning(self, mocker):
        """测试验证失败记为警告并携带字段"""
        slog = StructuredLogger("test")
        bound = mocker.patch.object(slog, "logger")

        slog.log_criterion("delta_inf/zeros", False, measured=0.5)

        bound.bind.assert_called_once_with(criterion="delta_inf/zeros", measured=0.5)
        bound.bind.return_value.warning.assert_called_once()

    def test_search_complete_fields(self, mocker):
        """测试搜索完成日志的字段"""
        slog = StructuredLogger("test")
        bound = mocker.patch.object(slog, "logger")

        slog.log_search_complete("thm5", 1.25, 300)

        bound.bind.assert_called_once_with(bound_id="thm5", value=1.25, evaluations=300)
        bound.bind.return_value.info.assert_called_once()
