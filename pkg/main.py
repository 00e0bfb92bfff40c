#!/usr/bin/env python3
"""
位置依存質量コヒーレント状態の検証ツール - メインスクリプト
spectrum / coherent / verify-all のサブコマンドで検証を実行し、JSON/CSV のレポートを出力する

終了コード: 0 = 全チェック成功, 1 = チェック失敗, 2 = 引数・設定の誤り
"""

import argparse
import sys
import time
from typing import List, Optional

from dotenv import load_dotenv

from src.utils.config import Config
from src.utils.errors import ConfigError, InvalidArgumentError, PdmError
from src.utils.infoclass import PROFILES, REFERENCES, Report, RunConfig, parse_grid
from src.utils.utils import aligned_json_dump, aligned_json_dumps, status
from src.verifiers.suites import cmd_coherent, cmd_spectrum, cmd_verify_all, report_frame

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="位置依存質量シュレディンガー方程式のコヒーレント状態を数値的に検証します",
        epilog="負の値は --alpha=-0.3,0.2 / --grid=-10:10:2001 のように = でつないでください",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="設定ファイル（既定: config.json または PDMCS_CONFIG）")
    common.add_argument("--reference", choices=REFERENCES, help="参照系")
    common.add_argument("--profile", choices=PROFILES, help="質量分布")
    common.add_argument("--gamma", type=float, help="質量分布パラメータ γ")
    common.add_argument("--grid", help="グリッド xmin:xmax:n（n は奇数）")
    common.add_argument("--n-points", type=int, help="グリッド点数だけを上書き")
    common.add_argument("--alpha", action="append", help="コヒーレント状態のラベル re,im（複数指定可）")
    common.add_argument("--n-max", type=int, help="Perelomov 展開の打ち切り次数")
    common.add_argument("--k", type=int, help="比較する固有値の個数")
    common.add_argument("--format", choices=("json", "csv"), help="出力形式")
    common.add_argument("--out", help="出力ファイル（省略時は標準出力）")
    common.add_argument("--dump-density", action="store_true", help="|⟨x|α⟩|² を CSV で出力（--format csv が必要）")
    common.add_argument("--quiet", action="store_true", help="進捗表示を出さない")
    common.add_argument("--timing", action="store_true", help="レポートに実行時間を含める")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="離散スペクトルと閉形式エネルギーの比較")
    sub.add_parser("coherent", parents=[common], help="コヒーレント状態の検査")
    sub.add_parser("verify-all", parents=[common], help="受け入れ検査一式")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    config = Config(args.config)
    grid = parse_grid(args.grid) if args.grid else {}
    if args.n_points is not None:
        grid["n_points"] = args.n_points
    overrides = {
        "reference": args.reference,
        "profile": args.profile,
        "gamma": args.gamma,
        "grid": grid,
        "alphas": args.alpha,
        "n_max": args.n_max,
        "k": args.k,
        "format": args.format,
        "output_path": args.out,
        "dump_density": args.dump_density or None,
    }
    return RunConfig.from_config(config, overrides)


def write_output(report: Report, density, config: RunConfig):
    """レポート（または密度表）を書き出す"""
    if config.format == "json":
        if config.output_path:
            aligned_json_dump(report.to_json(), config.output_path)
        else:
            sys.stdout.write(aligned_json_dumps(report.to_json()))
        return

    frame = density if density is not None else report_frame(report)
    frame.to_csv(config.output_path or sys.stdout, index=False, float_format="%.12g")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    load_dotenv()
    quiet = args.quiet

    try:
        config = run_config_from_args(args)
        status("[*]", f"{args.command}: {config.reference} / {config.profile} (γ={config.gamma:g}), "
                      f"grid [{config.x_min:g}, {config.x_max:g}] × {config.n_points}", quiet)
        start = time.perf_counter()
        density = None
        if args.command == "spectrum":
            report = cmd_spectrum(config)
        elif args.command == "coherent":
            report, density = cmd_coherent(config)
        else:
            report = cmd_verify_all(config, progress=lambda title: status("[*]", title, quiet))
        if args.timing:
            report.wall_time = time.perf_counter() - start
        write_output(report, density, config)
    except (ConfigError, InvalidArgumentError) as e:
        status("[!]", f"エラー: {e}", False)
        return EXIT_USAGE
    except PdmError as e:
        status("[!]", f"エラーが発生しました: {e}", False)
        return EXIT_FAILED
    except OSError as e:
        status("[!]", f"出力に失敗しました: {e}", False)
        return EXIT_USAGE

    summary = report.summary
    if report.ok:
        status("[OK]", f"{summary['passed']} 件のチェックがすべて成功しました", quiet)
        return EXIT_OK
    for check in report.checks:
        if not check.passed:
            status("[!]", f"失敗: {check.name} (value={check.value}, tolerance={check.tolerance})", quiet)
    status("[!]", f"{summary['failed']} / {summary['passed'] + summary['failed']} 件のチェックが失敗しました", quiet)
    return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
