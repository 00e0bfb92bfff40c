#!/usr/bin/env python3
"""
設定ファイル（config.json）の読み込み
環境変数 PDMCS_CONFIG / PDMCS_WORKERS で上書きできる
"""

import copy
import json
import os
import sys
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.utils.errors import ConfigError

DEFAULT_CONFIG_PATH = "config.json"

DEFAULT_TOLERANCES = {
    "spectrum": 1e-3,
    "annihilation": 1e-6,
    "factorization": 1e-4,
    "eigenstate": 1e-5,
    "equality": 1e-6,
    "harmonic_moments": 1e-8,
    "moments": 1e-7,
    "perelomov": 1e-6,
    "reduction": 1e-8,
    "second_solution": 1e-4,
    "commutator": 1e-4,
}


def default_config() -> Dict[str, Any]:
    """デフォルト設定"""
    return {
        "reference": "harmonic",
        "profile": {"kind": "case1", "gamma": 2.0},
        "grid": {"x_min": -10.0, "x_max": 10.0, "n_points": 2001},
        "coherent": {"alphas": [[0.3, 0.0], [0.0, 0.4], [0.3, 0.2]], "n_max": 40, "workers": 1},
        "spectrum": {"k": 5},
        "tolerances": dict(DEFAULT_TOLERANCES),
        "output": {"format": "json", "path": None},
    }


class Config:
    def __init__(self, config_path: Optional[str] = None):
        load_dotenv()
        self.config_path = config_path or os.getenv("PDMCS_CONFIG") or DEFAULT_CONFIG_PATH
        self.data = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """設定ファイルを読み込み、足りない項目はデフォルトで埋める"""
        data = default_config()
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                loaded = json.load(f)
        except FileNotFoundError:
            print(f"警告: {self.config_path} が見つかりません。デフォルト設定を使用します", file=sys.stderr)
            return data
        except json.JSONDecodeError as e:
            print(f"警告: {self.config_path} の読み込みでエラー: {e}", file=sys.stderr)
            return data

        for key, value in loaded.items():
            if isinstance(value, dict) and isinstance(data.get(key), dict):
                data[key] = {**data[key], **value}
            else:
                data[key] = copy.deepcopy(value)
        return data

    @property
    def reference(self) -> str:
        return self.data.get('reference', 'harmonic')

    @property
    def profile(self) -> Dict[str, Any]:
        return self.data.get('profile', {})

    @property
    def grid(self) -> Dict[str, Any]:
        return self.data.get('grid', {})

    @property
    def coherent(self) -> Dict[str, Any]:
        return self.data.get('coherent', {})

    @property
    def spectrum(self) -> Dict[str, Any]:
        return self.data.get('spectrum', {})

    @property
    def tolerances(self) -> Dict[str, float]:
        return self.data.get('tolerances', {})

    @property
    def output(self) -> Dict[str, Any]:
        return self.data.get('output', {})

    @property
    def workers(self) -> int:
        value = os.getenv("PDMCS_WORKERS") or self.coherent.get('workers', 1)
        try:
            return max(1, int(value))
        except (TypeError, ValueError):
            raise ConfigError(f"workers は整数: {value}")
