#!/usr/bin/env python3
"""
点正準変換（PCT）による位置依存質量シュレディンガー方程式の厳密解
参照系（調和振動子・Cariñena 非線形振動子）の解を f(x) で写して
有効ポテンシャル・固有関数・エネルギーを構成する
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

from src.numerics.grid import Grid, GridFunction, l2_norm
from src.physics.mass_profiles import MassProfile, ProfileKind
from src.utils.errors import InvalidArgumentError, UnsupportedQuantumNumberError

# 倍精度で H_n を扱える上限
HERMITE_MAX_N = 60

_PI_QUARTER = math.pi ** -0.25
# 非線形振動子の基底状態: ∫ e^{-y²}/(1+2y²)² dy = √π/2
_NONLINEAR_N0 = math.sqrt(2.0 / math.sqrt(math.pi))


class ReferenceKind(str, Enum):
    HARMONIC = "harmonic"
    NONLINEAR = "nonlinear"


def hermite_eval(n: int, y):
    """
    物理学者のエルミート多項式 H_n(y)（3項漸化式）

    Args:
        n: 次数（0 ≤ n ≤ 60）
        y: 評価点（スカラーまたは配列）
    """
    if int(n) != n or n < 0 or n > HERMITE_MAX_N:
        raise InvalidArgumentError(f"n は 0..{HERMITE_MAX_N} の整数: {n}")
    y = np.asarray(y, dtype=float)
    h_prev = np.ones_like(y)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h_curr = 2.0 * y
    for k in range(1, n):
        h_prev, h_curr = h_curr, 2.0 * y * h_curr - 2.0 * k * h_prev
    return h_curr if h_curr.ndim else float(h_curr)


def hermite_function(n: int, y) -> np.ndarray:
    """
    正規化エルミート関数 N_n H_n(y) e^{-y²/2}

    多項式を直接掛けると |y| が大きいところで inf·0 になるので、
    正規化済みの漸化式で計算する
    """
    if int(n) != n or n < 0 or n > HERMITE_MAX_N:
        raise InvalidArgumentError(f"n は 0..{HERMITE_MAX_N} の整数: {n}")
    y = np.asarray(y, dtype=float)
    psi_prev = _PI_QUARTER * np.exp(-0.5 * y * y)
    if n == 0:
        return psi_prev
    psi_curr = math.sqrt(2.0) * y * psi_prev
    for k in range(1, n):
        psi_prev, psi_curr = psi_curr, (
            math.sqrt(2.0 / (k + 1)) * y * psi_curr - math.sqrt(k / (k + 1)) * psi_prev
        )
    return psi_curr


@dataclass(frozen=True)
class ReferenceOscillator:
    """定数質量の参照系"""
    kind: ReferenceKind

    @property
    def ground_energy(self) -> float:
        return 0.5 if self.kind is ReferenceKind.HARMONIC else -1.5

    @property
    def has_closed_ground(self) -> bool:
        return self.kind in (ReferenceKind.HARMONIC, ReferenceKind.NONLINEAR)

    def allows(self, n: int) -> bool:
        if int(n) != n or n < 0:
            return False
        if self.kind is ReferenceKind.NONLINEAR:
            return n not in (1, 2)
        return True

    def quantum_numbers(self, count: int) -> List[int]:
        """下から count 個の量子数（非線形振動子は n = 1, 2 が欠ける）"""
        if self.kind is ReferenceKind.HARMONIC:
            return list(range(count))
        return [0] + list(range(3, 3 + count - 1)) if count > 0 else []

    def energy(self, n: int) -> float:
        if not self.allows(n):
            raise UnsupportedQuantumNumberError(f"{self.kind.value} に量子数 n={n} はありません")
        return n + 0.5 if self.kind is ReferenceKind.HARMONIC else n - 1.5

    def V(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        y2 = y * y
        if self.kind is ReferenceKind.HARMONIC:
            return 0.5 * y2
        return 0.5 * (y2 + 8.0 * (2.0 * y2 - 1.0) / (1.0 + 2.0 * y2) ** 2)

    def ground_log_amplitude(self, y) -> np.ndarray:
        """log ψ_0(y)（正規化定数込み）"""
        y = np.asarray(y, dtype=float)
        if self.kind is ReferenceKind.HARMONIC:
            return math.log(_PI_QUARTER) - 0.5 * y * y
        return math.log(_NONLINEAR_N0) - 0.5 * y * y - np.log1p(2.0 * y * y)

    def psi(self, n: int, y) -> np.ndarray:
        if self.kind is ReferenceKind.HARMONIC:
            return hermite_function(n, y)
        if n != 0:
            raise UnsupportedQuantumNumberError(
                f"非線形振動子の励起状態 n={n} は閉形式で扱いません（エネルギーはスペクトル検証のみ）"
            )
        return np.exp(self.ground_log_amplitude(y))


def make_reference(kind) -> ReferenceOscillator:
    try:
        return ReferenceOscillator(ReferenceKind(kind))
    except ValueError:
        raise InvalidArgumentError(f"不明な参照系: {kind}")


@dataclass(frozen=True)
class PdmProblem:
    profile: MassProfile
    reference: ReferenceOscillator

    def mass_correction(self, x) -> np.ndarray:
        """(1/8m)[m''/m - (7/4)(m'/m)²]"""
        m = self.profile.m(x)
        ratio = self.profile.dm(x) / m
        return (self.profile.d2m(x) / m - 1.75 * ratio * ratio) / (8.0 * m)

    def v_eff(self, x) -> np.ndarray:
        """有効ポテンシャル Ṽ(x) = V(f(x)) + 質量補正項"""
        return self.reference.V(self.profile.f(x)) + self.mass_correction(x)


def make_problem(reference, profile: MassProfile) -> PdmProblem:
    if not isinstance(reference, ReferenceOscillator):
        reference = make_reference(reference)
    return PdmProblem(profile=profile, reference=reference)


def example_mass_correction(profile: MassProfile, x) -> np.ndarray:
    """分布ごとに展開した質量補正項（一般式とは独立に書いたもの）"""
    x = np.asarray(x, dtype=float)
    g = profile.gamma
    if profile.kind is ProfileKind.CONSTANT:
        return np.zeros_like(x)
    if profile.kind is ProfileKind.CASE1:
        x2 = x * x
        return (g - 1.0) * (3.0 * x2 * x2 + 2.0 * (2.0 - g) * x2 - g) / (2.0 * (g + x2) ** 4)
    if profile.kind is ProfileKind.CASE2:
        sech = 1.0 / np.cosh(g * x)
        return (g * g / 16.0) * sech ** 4 * (7.0 - 3.0 * np.cosh(2.0 * g * x))
    raise InvalidArgumentError("custom 分布には展開形がありません")


def effective_potential(problem: PdmProblem, grid: Grid) -> GridFunction:
    return grid.sample(problem.v_eff)


def default_grid(problem: PdmProblem, spacing: float = 0.01) -> Grid:
    """
    境界で |ψ̃| が十分小さくなるグリッド

    [-10, 10] を max(1, 1/min√m) 倍し、刻みが spacing になるよう奇数点数を選ぶ
    """
    scale = max(1.0, 1.0 / problem.profile.min_sqrt_mass())
    half_width = 10.0 * scale
    half_points = int(round(half_width / spacing))
    return Grid(-half_width, half_width, 2 * half_points + 1)


def rescale_grid(problem: PdmProblem, base: Grid) -> Grid:
    """base の刻みを保ったまま、質量分布に合わせて幅を広げる"""
    scale = max(1.0, 1.0 / problem.profile.min_sqrt_mass())
    if scale == 1.0:
        return base
    half_points = int(round(scale * (base.n_points - 1) / 2))
    return Grid(scale * base.x_min, scale * base.x_max, 2 * half_points + 1)


def eigenfunction_samples(problem: PdmProblem, n: int, grid: Grid) -> GridFunction:
    """解析的な正規化定数のままの m^{1/4} ψ_n(f(x))"""
    reference = problem.reference
    if not reference.allows(n):
        raise UnsupportedQuantumNumberError(f"{reference.kind.value} に量子数 n={n} はありません")
    x = grid.x
    y = problem.profile.f(x)
    return GridFunction(grid, problem.profile.m(x) ** 0.25 * reference.psi(n, y))


def pdm_eigenfunction(problem: PdmProblem, n: int, grid: Grid) -> GridFunction:
    """
    PDM 固有関数 ψ̃_n = m^{1/4} ψ_n(f(x))

    Args:
        problem: PDM 問題
        n: 量子数（非線形振動子は n = 0 のみ）
        grid: 奇数点グリッド

    Returns:
        GridFunction: 数値ノルム 1 に再規格化した固有関数
    """
    raw = eigenfunction_samples(problem, n, grid)
    return raw / l2_norm(raw)


def pdm_energy(problem: PdmProblem, n: int) -> float:
    """Ẽ_n（質量分布に依らない）"""
    return problem.reference.energy(n)
