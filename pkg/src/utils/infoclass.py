# infoclass.py
# -*- coding: utf-8 -*-

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.utils.errors import ConfigError

SCHEMA_VERSION = "1"

REFERENCES = ("harmonic", "nonlinear")
PROFILES = ("constant", "case1", "case2")
FORMATS = ("json", "csv")


def parse_alpha(value) -> complex:
    """"re,im" / [re, im] / 数値 を complex に"""
    try:
        if isinstance(value, str):
            parts = [p.strip() for p in value.split(",")]
            if len(parts) == 1:
                return complex(float(parts[0]), 0.0)
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        elif isinstance(value, (list, tuple)) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
        elif isinstance(value, (int, float, complex)):
            return complex(value)
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"α は re,im の形式で指定してください: {value!r}")


def parse_grid(value: str) -> Dict[str, Any]:
    """"xmin:xmax:n" をグリッド設定に"""
    parts = value.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--grid は xmin:xmax:n の形式: {value!r}")
    try:
        return {"x_min": float(parts[0]), "x_max": float(parts[1]), "n_points": int(parts[2])}
    except ValueError:
        raise ConfigError(f"--grid を数値として読めません: {value!r}")


@dataclass
class RunConfig:
    reference: str
    profile: str
    gamma: float
    x_min: float
    x_max: float
    n_points: int
    alphas: List[complex]
    n_max: int = 40
    k: int = 5
    format: str = "json"
    output_path: Optional[str] = None
    dump_density: bool = False
    workers: int = 1
    tolerances: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.reference not in REFERENCES:
            raise ConfigError(f"--reference は {'/'.join(REFERENCES)}: {self.reference}")
        if self.profile not in PROFILES:
            raise ConfigError(f"--profile は {'/'.join(PROFILES)}: {self.profile}")
        if self.format not in FORMATS:
            raise ConfigError(f"--format は {'/'.join(FORMATS)}: {self.format}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or not self.x_min < self.x_max:
            raise ConfigError(f"グリッド端点が不正です: {self.x_min}, {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 9 or self.n_points % 2 == 0:
            raise ConfigError(f"n_points は 9 以上の奇数: {self.n_points}")
        if not 0 <= self.n_max <= 60:
            raise ConfigError(f"n_max は 0..60: {self.n_max}")
        if self.k < 1:
            raise ConfigError(f"k は 1 以上: {self.k}")
        if self.dump_density and self.format != "csv":
            raise ConfigError("--dump-density は --format csv と一緒に指定してください")
        self.alphas = [parse_alpha(a) for a in self.alphas]

    def require_alphas(self):
        if not self.alphas:
            raise ConfigError("coherent には少なくとも1つの --alpha が必要です")

    def tolerance(self, name: str) -> float:
        return float(self.tolerances[name])

    @classmethod
    def from_config(cls, config, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """Config と CLI 引数（None 以外）を合わせて RunConfig を作る"""
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        grid = {**config.grid, **overrides.pop("grid", {})}
        profile = config.profile
        coherent = config.coherent
        output = config.output
        try:
            return cls(
                reference=overrides.get("reference", config.reference),
                profile=overrides.get("profile", profile.get("kind", "constant")),
                gamma=float(overrides.get("gamma", profile.get("gamma", 0.0))),
                x_min=float(grid["x_min"]),
                x_max=float(grid["x_max"]),
                n_points=int(grid["n_points"]),
                alphas=list(overrides.get("alphas") or coherent.get("alphas", [])),
                n_max=int(overrides.get("n_max", coherent.get("n_max", 40))),
                k=int(overrides.get("k", config.spectrum.get("k", 5))),
                format=overrides.get("format", output.get("format", "json")),
                output_path=overrides.get("output_path", output.get("path")),
                dump_density=bool(overrides.get("dump_density", False)),
                workers=config.workers,
                tolerances=dict(config.tolerances),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"設定が不正です: {e}")

    def to_json(self) -> Dict[str, Any]:
        return {
            "reference": self.reference,
            "profile": {"kind": self.profile, "gamma": self.gamma},
            "grid": {"x_min": self.x_min, "x_max": self.x_max, "n_points": self.n_points},
            "alphas": list(self.alphas),
            "n_max": self.n_max,
            "k": self.k,
            "format": self.format,
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
        }


@dataclass
class CheckRecord:
    name: str
    value: Any
    tolerance: Optional[float]
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_json(cls, json_dict: Dict[str, Any]) -> "CheckRecord":
        return cls(
            name=json_dict["name"],
            value=json_dict["value"],
            tolerance=json_dict.get("tolerance"),
            passed=json_dict["passed"],
            detail=json_dict.get("detail", {}),
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class Report:
    command: str
    config: Dict[str, Any]
    checks: List[CheckRecord] = field(default_factory=list)
    wall_time: Optional[float] = None

    def add(self, name: str, value, tolerance: Optional[float] = None,
            passed: Optional[bool] = None, **detail) -> CheckRecord:
        """
        チェック結果を1件追加

        passed を省略すると value < tolerance で判定する（value が None・非有限なら失敗）
        """
        if any(c.name == name for c in self.checks):
            raise ValueError(f"チェック名が重複しています: {name}")
        if passed is None:
            passed = (
                value is not None
                and tolerance is not None
                and math.isfinite(float(value))
                and float(value) < tolerance
            )
        record = CheckRecord(name=name, value=value, tolerance=tolerance, passed=bool(passed), detail=detail)
        self.checks.append(record)
        return record

    def fail(self, name: str, message: str) -> CheckRecord:
        return self.add(name, None, None, passed=False, error=message)

    @property
    def summary(self) -> Dict[str, int]:
        passed = sum(1 for c in self.checks if c.passed)
        return {"passed": passed, "failed": len(self.checks) - passed}

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0

    @classmethod
    def from_json(cls, json_dict: Dict[str, Any]) -> "Report":
        return cls(
            command=json_dict["command"],
            config=json_dict["config"],
            checks=[CheckRecord.from_json(c) for c in json_dict["checks"]],
            wall_time=json_dict.get("wall_time"),
        )

    def to_json(self) -> Dict[str, Any]:
        data = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "summary": self.summary,
        }
        if self.wall_time is not None:
            data["wall_time"] = self.wall_time
        return data
