#!/usr/bin/env python3
"""
変形された昇降演算子
Â = (1/√2)[m^{-1/4} d/dx m^{-1/4} + φ]、Â†、変形運動量 Π、ハミルトニアン H と
因数分解 H - λ = Â†Â、2つ目の独立解 ũ の構成
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from src.numerics.grid import (
    Grid,
    GridFunction,
    cumulative_integral,
    diff1,
    diff1_extrapolated,
    diff2,
    inner_product,
    l2_norm,
)
from src.physics.mass_profiles import MassProfile
from src.physics.pct_solver import PdmProblem, ReferenceKind, pdm_eigenfunction
from src.utils.errors import DivisionHazardError, UnsupportedReferenceError

_SQRT2 = math.sqrt(2.0)
# これより小さい |u| では割らない
DIVISION_FLOOR = 1e-300


@dataclass(frozen=True)
class LadderSystem:
    """K, φ, φ' の閉形式と因数分解エネルギー λ"""
    profile: MassProfile
    reference: ReferenceKind
    lam: float

    def K(self, x) -> np.ndarray:
        p = self.profile
        f = p.f(x)
        df = p.sqrt_m(x)
        k = f * df - p.dm(x) / (4.0 * p.m(x))
        if self.reference is ReferenceKind.NONLINEAR:
            k = k + 4.0 * f * df / (1.0 + 2.0 * f * f)
        return k

    def phi(self, x) -> np.ndarray:
        f = self.profile.f(x)
        if self.reference is ReferenceKind.NONLINEAR:
            return f + 4.0 * f / (1.0 + 2.0 * f * f)
        return f

    def phi_prime(self, x) -> np.ndarray:
        df = self.profile.sqrt_m(x)
        if self.reference is ReferenceKind.NONLINEAR:
            f2 = self.profile.f(x) ** 2
            return df * (1.0 + 4.0 * (1.0 - 2.0 * f2) / (1.0 + 2.0 * f2) ** 2)
        return df

    def commutator_weight(self, x) -> np.ndarray:
        """[Â, Â†] = φ'/√m"""
        x = np.asarray(x, dtype=float)
        if self.reference is ReferenceKind.HARMONIC:
            return np.ones_like(x)
        return self.phi_prime(x) / self.profile.sqrt_m(x)


def build_ladder(problem: PdmProblem) -> LadderSystem:
    """
    参照系の基底状態から昇降演算子を組み立てる

    Returns:
        LadderSystem: λ = Ẽ_0
    """
    reference = problem.reference
    if not reference.has_closed_ground:
        raise UnsupportedReferenceError(f"{reference.kind.value} は基底状態の閉形式を持ちません")
    return LadderSystem(profile=problem.profile, reference=reference.kind, lam=reference.ground_energy)


def _derivative_part(profile: MassProfile, g: GridFunction) -> np.ndarray:
    # m^{-1/4} (m^{-1/4} g)' を積の微分で展開したもの（内部は6次の差分）
    x = g.grid.x
    m = profile.m(x)
    dg = diff1_extrapolated(g.values, g.grid.h)
    return dg / np.sqrt(m) - profile.dm(x) / (4.0 * m ** 1.5) * g.values


def apply_A(ls: LadderSystem, g: GridFunction) -> GridFunction:
    x = g.grid.x
    return GridFunction(g.grid, (_derivative_part(ls.profile, g) + ls.phi(x) * g.values) / _SQRT2)


def apply_A_dagger(ls: LadderSystem, g: GridFunction) -> GridFunction:
    x = g.grid.x
    return GridFunction(g.grid, (-_derivative_part(ls.profile, g) + ls.phi(x) * g.values) / _SQRT2)


def apply_Pi(ls: LadderSystem, g: GridFunction) -> GridFunction:
    """変形運動量 Π = -i m^{-1/4} d/dx m^{-1/4}"""
    return GridFunction(g.grid, -1j * _derivative_part(ls.profile, g))


def apply_H(problem: PdmProblem, g: GridFunction) -> GridFunction:
    """H g = -(1/2)[(1/m) g'' - (m'/m²) g'] + Ṽ g"""
    x = g.grid.x
    h = g.grid.h
    m = problem.profile.m(x)
    kinetic = -0.5 * (diff2(g.values, h) / m - problem.profile.dm(x) / (m * m) * diff1(g.values, h))
    return GridFunction(g.grid, kinetic + problem.v_eff(x) * g.values)


def factorization_residual(ls: LadderSystem, problem: PdmProblem, g: GridFunction) -> float:
    """‖Â†Â g - (H - λ) g‖"""
    lhs = apply_A_dagger(ls, apply_A(ls, g))
    rhs = apply_H(problem, g) - ls.lam * g
    return l2_norm(lhs - rhs)


def commutator_residual(ls: LadderSystem, g: GridFunction) -> float:
    """‖[Â, Â†] g - (φ'/√m) g‖"""
    a_adag = apply_A(ls, apply_A_dagger(ls, g))
    adag_a = apply_A_dagger(ls, apply_A(ls, g))
    weight = ls.commutator_weight(g.grid.x)
    return l2_norm(a_adag - adag_a - weight * g)


def hamiltonian_commutator_residuals(ls: LadderSystem, problem: PdmProblem,
                                     g: GridFunction) -> Tuple[float, float]:
    """
    [H, Â] = -(φ'/√m)Â と [H, Â†] = Â†(φ'/√m) の残差（H は λ を引いたもの）

    Returns:
        (Â 側の残差, Â† 側の残差)
    """
    def shifted_h(v: GridFunction) -> GridFunction:
        return apply_H(problem, v) - ls.lam * v

    weight = ls.commutator_weight(g.grid.x)
    a_g = apply_A(ls, g)
    res_a = shifted_h(a_g) - apply_A(ls, shifted_h(g)) + weight * a_g
    adag_g = apply_A_dagger(ls, g)
    res_adag = shifted_h(adag_g) - apply_A_dagger(ls, shifted_h(g)) - apply_A_dagger(ls, weight * g)
    return l2_norm(res_a), l2_norm(res_adag)


def _check_nodeless(u: np.ndarray, what: str):
    interior = u[1:-1]
    if np.any(np.abs(interior) < DIVISION_FLOOR):
        raise DivisionHazardError(f"{what}: 内部ノードで |u| < {DIVISION_FLOOR:g}")
    re = np.real(interior)
    if np.any(re[:-1] * re[1:] < 0.0):
        raise DivisionHazardError(f"{what}: u が符号を変えています（節があります）")


def k_from_ground(u: GridFunction) -> GridFunction:
    """Riccati 方程式の線形化 K = -u'/u"""
    _check_nodeless(u.values, "k_from_ground")
    return GridFunction(u.grid, -diff1(u.values, u.grid.h) / u.values)


def phi_from_K(K: GridFunction, profile: MassProfile) -> GridFunction:
    """φ = K/√m + m'/(4 m^{3/2})"""
    x = K.grid.x
    m = profile.m(x)
    return K / np.sqrt(m) + profile.dm(x) / (4.0 * m ** 1.5)


def phi_from_eta(eta: GridFunction, profile: MassProfile) -> GridFunction:
    """η から超ポテンシャルを作る形: K̃ = η'/η, φ̃ = K̃/√m - m'/(4 m^{3/2})"""
    _check_nodeless(eta.values, "phi_from_eta")
    x = eta.grid.x
    m = profile.m(x)
    k_tilde = diff1(eta.values, eta.grid.h) / eta.values
    return GridFunction(eta.grid, k_tilde / np.sqrt(m) - profile.dm(x) / (4.0 * m ** 1.5))


def _bulk_range(u: np.ndarray, threshold: float) -> Tuple[int, int]:
    # 最大値を含む |u| > threshold·max|u| の連続区間（点数は奇数にそろえる）
    mag = np.abs(u)
    peak = int(np.argmax(mag))
    keep = mag > threshold * mag[peak]
    lo = peak
    while lo > 0 and keep[lo - 1]:
        lo -= 1
    hi = peak
    while hi < len(u) - 1 and keep[hi + 1]:
        hi += 1
    if (hi - lo) % 2 == 1:
        hi -= 1
    return lo, hi


@dataclass(frozen=True)
class NumericLadder:
    """数値経路 ψ̃_0 → K → φ の結果（基底状態が十分大きい区間のみ）"""
    K: GridFunction
    phi: GridFunction
    start: int
    stop: int


def build_ladder_numeric(problem: PdmProblem, grid: Grid, threshold: float = 1e-8) -> NumericLadder:
    """
    閉形式を使わずに基底状態の数値サンプルから K と φ を作る

    Args:
        problem: PDM 問題
        grid: グリッド
        threshold: |ψ̃_0| > threshold·max|ψ̃_0| の区間だけを使う
    """
    u = pdm_eigenfunction(problem, 0, grid)
    lo, hi = _bulk_range(u.values, threshold)
    bulk = u.restrict(lo, hi)
    K = k_from_ground(bulk)
    return NumericLadder(K=K, phi=phi_from_K(K, problem.profile), start=lo, stop=hi)


class SecondSolution(NamedTuple):
    u_tilde: GridFunction
    eta: GridFunction


def second_solution(u: GridFunction, profile: MassProfile, trust: float = 1e-6) -> SecondSolution:
    """
    同じ λ での2つ目の独立解 ũ = u·∫_0^x m/|u|² dx' と η = √m/u

    ũ は e^{+f²/2} で増大するので、|u| > trust·max|u| の区間に制限して返す

    Returns:
        SecondSolution: 信頼区間上の (ũ, η)
    """
    lo, hi = _bulk_range(u.values, trust)
    core = u.restrict(lo, hi)
    _check_nodeless(core.values, "second_solution")
    grid = core.grid
    x = grid.x
    m = profile.m(x)
    anchor = 0.0 if grid.x_min <= 0.0 <= grid.x_max else float(x[int(np.argmax(np.abs(core.values)))])
    weight = GridFunction(grid, m / np.abs(core.values) ** 2)
    u_tilde = core * cumulative_integral(weight, anchor)
    eta = GridFunction(grid, np.sqrt(m) / core.values)
    return SecondSolution(u_tilde=u_tilde, eta=eta)


def second_solution_residual(ls: LadderSystem, solution: SecondSolution) -> float:
    """‖Âũ - cη‖/‖cη‖（c は最小二乗で合わせた定数、理論値は 1/√2）"""
    a_u = apply_A(ls, solution.u_tilde)
    eta = solution.eta
    scale = inner_product(eta, a_u) / inner_product(eta, eta)
    fitted = scale * eta
    return l2_norm(a_u - fitted) / l2_norm(fitted)
