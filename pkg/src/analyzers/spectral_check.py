#!/usr/bin/env python3
"""
有限差分によるスペクトル検証
PDM ハミルトニアンを保存形の3重対角行列に離散化し、Sturm 列の二分法で
下から k 個の固有値を求めて閉形式のエネルギーと比較する
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from src.numerics.grid import Grid
from src.physics.pct_solver import PdmProblem, default_grid, pdm_energy
from src.utils.errors import InvalidArgumentError

# 二分法の最終区間幅
BISECTION_WIDTH = 1e-10


@dataclass(frozen=True)
class DiscreteHamiltonian:
    """内部ノード上の対称3重対角行列（Dirichlet 境界）"""
    grid: Grid
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        """テスト用の密行列"""
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def discretize(problem: PdmProblem, grid: Grid) -> DiscreteHamiltonian:
    """
    (Hψ)_i = -(1/2h²)[w_{i+½}(ψ_{i+1}-ψ_i) - w_{i-½}(ψ_i-ψ_{i-1})] + Ṽ_i ψ_i,  w = 1/m（中点）

    Args:
        problem: PDM 問題
        grid: グリッド（両端は Dirichlet 境界として落とす）

    Returns:
        DiscreteHamiltonian
    """
    x = grid.x
    h = grid.h
    interior = x[1:-1]
    midpoints = 0.5 * (x[:-1] + x[1:])
    w = 1.0 / problem.profile.m(midpoints)
    scale = 0.5 / (h * h)

    diag = scale * (w[:-1] + w[1:]) + problem.v_eff(interior)
    offdiag = -scale * w[1:-1]
    return DiscreteHamiltonian(grid=grid, diag=np.asarray(diag, dtype=float), offdiag=np.asarray(offdiag, dtype=float))


def _sturm_counts(H: DiscreteHamiltonian, lams: np.ndarray) -> np.ndarray:
    # 主小行列式比の漸化式 q_i = d_i - λ - e_{i-1}²/q_{i-1} の負の個数（λ はベクトル）
    d = H.diag
    e2 = H.offdiag ** 2
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(e2)) if e2.size else 1.0)

    q = d[0] - lams
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0.0).astype(int)
    for i in range(1, d.shape[0]):
        q = d[i] - lams - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0.0
    return count


def sturm_count(H: DiscreteHamiltonian, lam: float) -> int:
    """λ より小さい固有値の個数"""
    return int(_sturm_counts(H, np.array([float(lam)]))[0])


def _gershgorin(H: DiscreteHamiltonian):
    radius = np.zeros_like(H.diag)
    radius[:-1] += np.abs(H.offdiag)
    radius[1:] += np.abs(H.offdiag)
    return float(np.min(H.diag - radius)), float(np.max(H.diag + radius))


def lowest_eigenvalues(H: DiscreteHamiltonian, k: int) -> np.ndarray:
    """
    Sturm 列の二分法で下から k 個の固有値を昇順に返す

    k 個の区間を同時に二分していく（各区間の幅が 1e-10 以下になるまで）
    """
    if int(k) != k or not 1 <= k <= H.size:
        raise InvalidArgumentError(f"k は 1..{H.size} の整数: {k}")
    k = int(k)
    lower, upper = _gershgorin(H)
    pad = 1e-8 * max(1.0, abs(lower), abs(upper))
    lo = np.full(k, lower - pad)
    hi = np.full(k, upper + pad)
    index = np.arange(k)

    iterations = int(math.ceil(math.log2((hi[0] - lo[0]) / BISECTION_WIDTH))) + 1
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = _sturm_counts(H, mid) > index
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= BISECTION_WIDTH):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SpectrumRow:
    n: int
    analytic: float
    discrete: float
    gap: float


@dataclass(frozen=True)
class SpectrumReport:
    reference: str
    profile: dict
    grid: dict
    rows: List[SpectrumRow]

    @property
    def max_gap(self) -> float:
        return max((row.gap for row in self.rows), default=0.0)

    def passed(self, tolerance: float) -> bool:
        return self.max_gap < tolerance

    def to_json(self) -> dict:
        data = asdict(self)
        data["max_gap"] = self.max_gap
        return data


def spectrum_report(problem: PdmProblem, grid: Grid, k: int) -> SpectrumReport:
    """(n, 閉形式 Ẽ_n, 離散固有値, 差) の表（非線形振動子では n = 1, 2 を飛ばす）"""
    eigenvalues = lowest_eigenvalues(discretize(problem, grid), k)
    rows = []
    for n, value in zip(problem.reference.quantum_numbers(k), eigenvalues):
        analytic = pdm_energy(problem, n)
        rows.append(SpectrumRow(n=n, analytic=analytic, discrete=float(value), gap=abs(float(value) - analytic)))
    return SpectrumReport(
        reference=problem.reference.kind.value,
        profile=problem.profile.describe(),
        grid={"x_min": grid.x_min, "x_max": grid.x_max, "n_points": grid.n_points},
        rows=rows,
    )


def convergence_order(problem: PdmProblem, n_points_coarse: int, k: int = 3,
                      domain: Optional[Grid] = None) -> float:
    """
    n 点と 2n-1 点（刻み半分）での最大誤差の比から収束次数を推定

    Args:
        problem: PDM 問題
        n_points_coarse: 粗いグリッドの点数
        k: 比較する準位数
        domain: 区間（省略時は default_grid の区間）

    Returns:
        float: log₂(粗い誤差 / 細かい誤差)、2次スキームなら ≈ 2
    """
    domain = domain or default_grid(problem)
    coarse = Grid(domain.x_min, domain.x_max, n_points_coarse)
    fine = Grid(domain.x_min, domain.x_max, 2 * n_points_coarse - 1)
    gap_coarse = spectrum_report(problem, coarse, k).max_gap
    gap_fine = spectrum_report(problem, fine, k).max_gap
    if gap_fine == 0.0:
        return math.inf
    return math.log2(gap_coarse / gap_fine)
