"""
hojman 命令行

    hojman check|invariant|verify|lagrangian <问题文件> [选项]

退出码：0 通过，1 前提或认证未通过，2 输入错误。
"""

import argparse
import logging
import math
import sys
from typing import List, Optional, Tuple

from ..errors import HojmanError
from ..utils import Config, configure_logging
from .commands import SHOW_CHOICES, THEOREM_CHOICES, RunOptions, run_command
from .problem import ProblemFile, load_problem
from .report import Report

logger = logging.getLogger(__name__)


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"不是数值: {text}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"必须为有限数值: {text}")
    return value


def _positive_float(text: str) -> float:
    value = _finite_float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"必须为正数: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hojman",
        description="Hojman 对称守恒量：构造、检验与数值认证",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
    hojman check problems/oscillator.json              检查对称、乘子与正规化子条件
    hojman invariant problems/dilation.json            构造守恒量（自动选择构造方式）
    hojman invariant problems/oscillator.json --theorem t21 --json
    hojman verify problems/oscillator.json --step 1e-3 --span 0 10 --csv out/traj.csv
    hojman lagrangian problems/caldirola_kanai.json --show forces

配置文件: config/config.yaml（可用 --config 或环境变量 HOJMAN_CONFIG 指定）
采样种子: --seed > 环境变量 HOJMAN_SEED > 问题文件 > 配置文件
        """
    )
    parser.add_argument("command", choices=("check", "invariant", "verify", "lagrangian"), help="子命令")
    parser.add_argument("problem", help="问题文件路径 (JSON)")
    parser.add_argument(
        "--theorem", choices=THEOREM_CHOICES, default="auto", metavar="T",
        help="构造方式: auto, t21, t22, t23, t41, lagrangian, hamiltonian, sode（默认 auto）；"
             "t21~t41 也可写作 divfree, multiplier, normalizer, nonautonomous",
    )
    parser.add_argument("--json", action="store_true", help="输出单行 JSON 报告")
    parser.add_argument("--csv", help="verify: 轨线导出为 CSV")
    parser.add_argument("--step", type=_positive_float, help="积分步长")
    parser.add_argument("--span", nargs=2, type=_finite_float, metavar=("A", "B"), help="积分区间 [A, B]")
    parser.add_argument("--seed", type=int, help="采样种子")
    parser.add_argument("--rtol", type=_positive_float, help="数值判等的相对容差")
    parser.add_argument("--show", choices=SHOW_CHOICES, default="all", help="lagrangian: 输出哪些导出量")
    parser.add_argument("-c", "--config", help="配置文件路径（默认: ./config/config.yaml）")
    parser.add_argument("-v", "--verbose", action="store_true", help="输出调试日志")
    return parser


def _resolve_seed(args_seed: Optional[int], config: Config, file_seed: int) -> int:
    if args_seed is not None:
        return args_seed
    env_seed = config.env_seed
    if env_seed is not None:
        return env_seed
    return file_seed


def _emit(report: Report, as_json: bool):
    print(report.to_json() if as_json else report.to_text())


def _prepare(args: argparse.Namespace, report: Report) -> Tuple[ProblemFile, RunOptions]:
    """读取配置与问题文件，合并运行选项；输入错误以 HojmanError 抛出"""
    config = Config(args.config)
    configure_logging(config, args.verbose)

    problem = load_problem(args.problem, config)
    seed = _resolve_seed(args.seed, config, problem.box.seed)
    problem.box = problem.box.with_seed(seed)
    report.provenance = {"file_sha256": problem.sha256, "seed": seed}

    options = RunOptions.from_config(
        config,
        theorem=args.theorem,
        rtol=args.rtol,
        step_override=args.step,
        span_override=tuple(args.span) if args.span else None,
        csv=args.csv,
        show=args.show,
    )
    return problem, options


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.span is not None and not args.span[1] > args.span[0]:
        parser.error(f"--span 区间无效: {args.span}")

    report = Report(args.command)
    try:
        problem, options = _prepare(args, report)
    except HojmanError as e:
        logger.error("输入无效: %s", e)
        _emit(report.error(str(e)), args.json)
        return report.exit_code

    logger.info("运行 %s: %s", args.command, problem.path)
    report = run_command(args.command, problem, options, report)
    _emit(report, args.json)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
