"""
命令行入口

子命令 sweep / region / gap / verify；数据写到标准输出或文件，日志写到标准错误
"""

import argparse
import json
import sys
from typing import List, Optional

from ..core.channel import ChannelKind, ChannelParams
from ..core.errors import GicBoundsError, UsageError
from ..region.rate_region import RegionOptions
from ..search.param_search import SearchOptions
from ..utils.config import Config
from ..utils.helpers import db_to_power, parse_name_list
from ..utils.logger import get_logger, setup_logging
from .tables import (
    GAP_COLUMNS,
    REGION_COLUMNS,
    SweepSpec,
    gap_rows,
    region_names,
    region_rows,
    sweep_columns,
    sweep_rows,
    write_rows,
)
from .verify import CRITERIA, run_verification

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    """参数错误统一抛出 UsageError"""

    def error(self, message):
        raise UsageError(message)


def _add_axis_arguments(parser: argparse.ArgumentParser):
    power = parser.add_mutually_exclusive_group()
    power.add_argument("--p", help="功率：标量或 start:stop:step")
    power.add_argument("--snr-db", dest="snr_db", help="SNR（dB），P = 10^(x/10)")
    gain = parser.add_mutually_exclusive_group()
    gain.add_argument("--g2", help="交叉增益平方：标量或 start:stop:step")
    gain.add_argument("--alpha", help="GDOF 指数 α：标量或 start:stop:step")


def _add_output_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--output", "--out", dest="out", help="输出文件，缺省为标准输出")
    parser.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv", help="输出格式")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gic-bounds", description="两用户高斯干扰信道容量界计算")
    parser.add_argument("--log-level", default=None, help="日志级别（缺省取配置）")
    parser.add_argument("--config", default=None, help="配置文件路径")
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)

    sweep = subparsers.add_parser("sweep", help="在 (P, g²) 网格上计算和速率界")
    _add_axis_arguments(sweep)
    sweep.add_argument("--bounds", default=None, help="逗号分隔的界列表或 all")
    sweep.add_argument("--mode", choices=["real", "complex"], default=None, help="信道类型")
    sweep.add_argument("--threads", type=int, default=None, help="并发工作数")
    _add_output_arguments(sweep)

    region = subparsers.add_parser("region", help="追踪容量域内外界的边界")
    region.add_argument("--p", help="功率")
    region.add_argument("--snr-db", dest="snr_db", help="SNR（dB）")
    region.add_argument("--g2", required=True, type=float, help="交叉增益平方")
    region.add_argument("--regions", default="all", help="逗号分隔的区域列表或 all")
    region.add_argument("--points", type=int, default=None, help="每个边界的 R2 网格点数")
    _add_output_arguments(region)

    gap = subparsers.add_parser("gap", help="速率差与高信噪比刻画")
    _add_axis_arguments(gap)
    _add_output_arguments(gap)

    verify = subparsers.add_parser("verify", help="运行数值结论验证套件")
    verify.add_argument("--only", default=None, help="逗号分隔的条目名")
    verify.add_argument("--list", action="store_true", help="列出全部条目")
    verify.add_argument("--tolerance-scale", type=float, default=None, help="容差缩放系数")
    verify.add_argument("--seed", type=int, default=None, help="随机实例种子")
    verify.add_argument("--output", "--out", dest="out", help="报告输出文件，缺省为标准输出")
    return parser


def cmd_sweep(args, config: Config) -> int:
    spec = SweepSpec.build(
        p=args.p, snr_db=args.snr_db, g2=args.g2, alpha=args.alpha,
        bounds=args.bounds or config.get("sweep.default_bounds", "all"),
        mode=ChannelKind(args.mode or config.get("channel.kind", "real")),
        output=args.out, fmt=args.fmt,
    )
    rows = sweep_rows(
        spec,
        SearchOptions.from_config(config),
        workers=args.threads if args.threads is not None else config.sweep_threads(),
    )
    write_rows(rows, sweep_columns(spec), spec.fmt, spec.output, config.get("sweep.float_digits", 12))
    return EXIT_OK


def cmd_region(args, config: Config) -> int:
    if (args.p is None) == (args.snr_db is None):
        raise UsageError("必须且只能给出 --p 与 --snr-db 之一")
    try:
        power = float(args.p) if args.p is not None else db_to_power(float(args.snr_db))
    except ValueError:
        raise UsageError(f"无法解析功率: {args.p or args.snr_db}")
    if args.g2 < 0:
        raise UsageError(f"g² 不能为负: {args.g2}")

    opts = RegionOptions.from_config(config)
    if args.points is not None:
        if args.points < 2:
            raise UsageError("--points 必须不小于 2")
        opts = opts.model_copy(update={"points": args.points})
    ch = ChannelParams.from_g2(power, args.g2)
    rows = region_rows(ch, region_names(args.regions), opts)
    write_rows(rows, REGION_COLUMNS, args.fmt, args.out, config.get("sweep.float_digits", 12))
    return EXIT_OK


def cmd_gap(args, config: Config) -> int:
    spec = SweepSpec.build(
        p=args.p, snr_db=args.snr_db, g2=args.g2, alpha=args.alpha, output=args.out, fmt=args.fmt
    )
    write_rows(gap_rows(spec), GAP_COLUMNS, spec.fmt, spec.output, config.get("sweep.float_digits", 12))
    return EXIT_OK


def cmd_verify(args, config: Config) -> int:
    if args.list:
        sys.stdout.write("\n".join(CRITERIA) + "\n")
        return EXIT_OK
    only = parse_name_list(args.only, tuple(CRITERIA), "criteria") if args.only else None
    scale = args.tolerance_scale if args.tolerance_scale is not None else config.get("verify.tolerance_scale", 1.0)
    seed = args.seed if args.seed is not None else config.get("verify.seed", 2024)

    report = run_verification(only=only, tolerance_scale=float(scale), seed=int(seed))
    text = json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


COMMANDS = {
    "sweep": cmd_sweep,
    "region": cmd_region,
    "gap": cmd_gap,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    命令行主函数

    Args:
        argv: 参数列表，缺省取 sys.argv[1:]

    Returns:
        退出码：0 成功，1 验证失败，2 用法错误
    """
    try:
        args = build_parser().parse_args(argv)
        config = Config(args.config)
        setup_logging(
            level=args.log_level or config.get("logging.level", "WARNING"),
            log_file=config.get("logging.file"),
            rotation=config.get("logging.rotation", "1 day"),
            retention=config.get("logging.retention", "30 days"),
            format_string=config.get("logging.format"),
            force=True,
        )
        if not args.command:
            raise UsageError("请指定子命令: sweep / region / gap / verify")
        if not config.validate():
            raise UsageError("配置验证失败")
        logger.info(f"执行子命令: {args.command}")
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except GicBoundsError as e:
        logger.error(f"计算失败: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.info("收到中断信号，正在退出...")
        return EXIT_USAGE
