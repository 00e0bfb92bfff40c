import json
import math
import sys
from typing import Any

import numpy as np

# レポートの浮動小数点は有効数字12桁に固定
SIGNIFICANT_DIGITS = 12


def round_sig(value: float, digits: int = SIGNIFICANT_DIGITS):
    """有効数字 digits 桁に丸める（NaN/Inf は None）"""
    value = float(value)
    if not math.isfinite(value):
        return None
    if value == 0.0:
        return 0.0
    return float(f"{value:.{digits}g}")


def to_plain(obj: Any) -> Any:
    """
    JSON に書ける形へ再帰的に変換

    complex は [re, im]、numpy の配列・スカラーは list/float に、float は有効数字12桁に丸める
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_sig(obj.real), round_sig(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj)
    return obj


def aligned_json_dump(obj, output_path):
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(to_plain(obj), f, ensure_ascii=False, indent=4, separators=(',', ': '))
        f.write("\n")


def aligned_json_dumps(obj) -> str:
    return json.dumps(to_plain(obj), ensure_ascii=False, indent=4, separators=(',', ': ')) + "\n"


def status(marker: str, message: str, quiet: bool = False):
    """[*] / [OK] / [!] 付きの進捗表示（stdout はレポート用に空けておく）"""
    if not quiet:
        print(f"{marker} {message}", file=sys.stderr)
