"""
命令行测试

测试各子命令的输出格式、退出码与输出稳定性
"""

import json
import math

import pytest

from src.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, CRITERIA, main, write_rows
from src.cli.tables import GAP_COLUMNS
from src.utils.logger import setup_logging

# 设置测试日志
setup_logging(level="DEBUG")


@pytest.fixture
def run(tmp_path, capsys):
    """以默认配置运行命令行，返回 (退出码, stdout, stderr)"""
    def invoke(*argv):
        code = main(["--log-level", "ERROR", "--config", str(tmp_path / "missing.yaml"), *argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return invoke


class TestSweepCommand:
    """sweep 子命令测试"""

    def test_csv_header_and_rows(self, run):
        """测试 CSV 表头与行数"""
        code, out, _ = run("sweep", "--p", "100", "--g2", "0.1:0.3:0.1", "--bounds", "tdm,r_sym_star")
        lines = out.strip().split("\n")

        assert code == EXIT_OK
        assert lines[0] == "P,g2,alpha,r_sym_star,tdm,regime"
        assert len(lines) == 4
        assert lines[1].startswith("100,0.1,0.5,")

    def test_tdm_value(self, run):
        """测试 TDM 列取值"""
        _, out, _ = run("sweep", "--p", "100", "--g2", "0.5", "--bounds", "tdm")
        row = out.strip().split("\n")[1].split(",")

        assert float(row[3]) == pytest.approx(0.5 * math.log2(201.0), abs=1e-11)
        assert row[4] == "moderate"

    def test_json_format(self, run):
        """测试 JSON 输出"""
        code, out, _ = run("sweep", "--snr-db", "20", "--g2", "0.5", "--bounds", "tdm", "--format", "json")
        records = json.loads(out)

        assert code == EXIT_OK
        assert len(records) == 1
        assert list(records[0]) == ["P", "g2", "alpha", "tdm", "regime"]
        assert records[0]["P"] == pytest.approx(100.0)

    def test_alpha_axis(self, run):
        """测试按 α 扫描"""
        _, out, _ = run("sweep", "--p", "100", "--alpha", "0.5", "--bounds", "tdm")

        assert out.strip().split("\n")[1].startswith("100,0.1,0.5,")

    def test_output_file(self, run, tmp_path):
        """测试写到文件时标准输出为空"""
        path = tmp_path / "sweep.csv"
        code, out, _ = run("sweep", "--p", "100", "--g2", "0.5", "--bounds", "tdm", "--out", str(path))

        assert code == EXIT_OK
        assert out == ""
        assert path.read_text(encoding="utf-8").startswith("P,g2,alpha,tdm,regime\n")

    def test_repeat_runs_identical(self, run):
        """测试重复运行逐字节一致"""
        argv = ("sweep", "--p", "10:30:10", "--g2", "0.2:0.6:0.2", "--bounds", "r_sym_star,hk,underline_r")

        assert run(*argv)[1] == run(*argv)[1]

    def test_out_of_domain_is_nan(self, run):
        """测试强干扰下弱干扰闭式输出 nan"""
        _, out, _ = run("sweep", "--p", "100", "--g2", "2.0", "--bounds", "hk_fixed_a")

        assert out.strip().split("\n")[1].split(",")[3] == "nan"

    @pytest.mark.parametrize("argv", [
        ("sweep", "--p", "100"),
        ("sweep", "--g2", "0.5"),
        ("sweep", "--p", "100", "--g2", "1.0:0.5:0.1"),
        ("sweep", "--p", "100", "--g2", "0.5", "--bounds", ","),
        ("sweep", "--p", "100", "--g2", "0.5", "--bounds", "nope"),
        ("sweep", "--p", "abc", "--g2", "0.5"),
        ("sweep", "--p", "100", "--snr-db", "20", "--g2", "0.5"),
    ])
    def test_usage_errors(self, run, argv):
        """测试用法错误返回 2"""
        code, out, err = run(*argv)

        assert code == EXIT_USAGE
        assert out == ""
        assert "usage error" in err

    def test_missing_command(self, run):
        """测试缺少子命令"""
        assert run()[0] == EXIT_USAGE


class TestRegionCommand:
    """region 子命令测试"""

    def test_rows_per_region(self, run):
        """测试按区域分段输出"""
        code, out, _ = run("region", "--p", "7", "--g2", "0.2", "--regions", "tdm_inner,etw", "--points", "20")
        lines = out.strip().split("\n")

        assert code == EXIT_OK
        assert lines[0] == "region,R1,R2"
        assert len(lines) == 41
        assert lines[1].startswith("etw,")
        assert lines[-1].startswith("tdm_inner,")

    def test_requires_power(self, run):
        """测试缺少功率"""
        assert run("region", "--g2", "0.2")[0] == EXIT_USAGE

    def test_unknown_region(self, run):
        """测试未知区域"""
        assert run("region", "--p", "7", "--g2", "0.2", "--regions", "nope")[0] == EXIT_USAGE


class TestGapCommand:
    """gap 子命令测试"""

    def test_columns(self, run):
        """测试列顺序"""
        code, out, _ = run("gap", "--p", "100", "--g2", "0.5")
        lines = out.strip().split("\n")

        assert code == EXIT_OK
        assert lines[0] == ",".join(GAP_COLUMNS)
        assert len(lines) == 2


class TestVerifyCommand:
    """verify 子命令测试"""

    def test_single_criterion(self, run):
        """测试只运行一个条目"""
        code, out, _ = run("verify", "--only", "delta_inf")
        report = json.loads(out)

        assert code == EXIT_OK
        assert report["passed"]
        assert report["total"] == 4
        assert report["failed"] == 0

    def test_zero_tolerance_fails(self, run):
        """测试容差为 0 时失败路径"""
        code, out, _ = run("verify", "--only", "delta_inf", "--tolerance-scale", "0")

        assert code == EXIT_VERIFY_FAILED
        assert not json.loads(out)["passed"]

    def test_report_file(self, run, tmp_path):
        """测试报告写到文件"""
        path = tmp_path / "report.json"
        code, out, _ = run("verify", "--only", "tdm_hk_crossing", "--out", str(path))

        assert code == EXIT_OK
        assert out == ""
        assert json.loads(path.read_text(encoding="utf-8"))["passed"]

    def test_unknown_criterion(self, run):
        """测试未知条目"""
        assert run("verify", "--only", "nope")[0] == EXIT_USAGE

    def test_list(self, run):
        """测试列出全部条目"""
        code, out, _ = run("verify", "--list")

        assert code == EXIT_OK
        assert out.split() == list(CRITERIA)


class TestWriteRows:
    """表格输出测试"""

    def test_csv_formatting(self, capsys):
        """测试 nan、布尔与有效数字"""
        write_rows([{"a": math.nan, "b": 1.0 / 3.0, "c": True}], ["a", "b", "c"], digits=6)

        assert capsys.readouterr().out == "a,b,c\nnan,0.333333,true\n"

    def test_json_formatting(self, capsys):
        """测试 JSON 中非有限值写为字符串"""
        write_rows([{"a": math.inf, "b": 0.5}], ["a", "b"], fmt="json")

        assert json.loads(capsys.readouterr().out) == [{"a": "inf", "b": 0.5}]

    def test_missing_column_blank(self, capsys):
        """测试缺失列输出空值"""
        write_rows([{"a": 1.0}], ["a", "b"])

        assert capsys.readouterr().out == "a,b\n1,\n"
