#!/usr/bin/env python3
"""
コヒーレント状態の構成と検証
|α⟩ = ψ̃_0 exp[√2 α f(x)]、不確定性関係、Perelomov 型の展開と変位
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from src.numerics.grid import Grid, GridFunction, inner_product, l2_norm
from src.physics.ladder import LadderSystem, apply_A, apply_Pi, build_ladder
from src.physics.mass_profiles import SMALL_GAMMA, ProfileKind
from src.physics.pct_solver import (
    HERMITE_MAX_N,
    PdmProblem,
    ReferenceKind,
    pdm_eigenfunction,
)
from src.utils.errors import (
    DomainTooSmallError,
    InvalidArgumentError,
    PdmError,
    UnsupportedReferenceError,
)

_SQRT2 = math.sqrt(2.0)
# 包絡線がグリッド端から離れているべき距離（f 空間）
ENVELOPE_MARGIN = 4.0


@dataclass(frozen=True)
class CoherentState:
    alpha: complex
    state: GridFunction
    norm_constant: float


@dataclass(frozen=True)
class UncertaintyReport:
    mean_phi: float
    mean_pi: float
    var_phi: float
    var_pi: float
    product: float
    commutator_mean: float
    bound: float
    equality_gap: float

    @property
    def relative_gap(self) -> float:
        return self.equality_gap / self.bound if self.bound > 0.0 else math.inf


def _envelope_guard(problem: PdmProblem, alpha: complex, grid: Grid):
    half_width = min(-grid.x_min, grid.x_max)
    reach = half_width * float(np.min(problem.profile.sqrt_m(grid.x))) - ENVELOPE_MARGIN
    if not _SQRT2 * abs(alpha.real) < reach:
        raise DomainTooSmallError(
            f"α = {alpha} の包絡線がグリッドに収まりません（√2|Re α| = {_SQRT2 * abs(alpha.real):.3g} ≥ {reach:.3g}）"
        )


def make_coherent(problem: PdmProblem, ls: LadderSystem, alpha: complex, grid: Grid) -> CoherentState:
    """
    コヒーレント状態 |α⟩ ∝ ψ̃_0 e^{√2 α f}

    オーバーフローを避けるため対数振幅で組み立て、数値ノルムで規格化する

    Args:
        problem: PDM 問題
        ls: 昇降演算子（Â|α⟩ = α|α⟩ の Â）
        alpha: 複素ラベル
        grid: 奇数点グリッド

    Returns:
        CoherentState
    """
    alpha = complex(alpha)
    _envelope_guard(problem, alpha, grid)
    x = grid.x
    f = problem.profile.f(x)
    log_amp = (
        0.25 * np.log(problem.profile.m(x))
        + problem.reference.ground_log_amplitude(f)
        + _SQRT2 * alpha * f
    )
    raw = GridFunction(grid, np.exp(log_amp))
    norm_constant = 1.0 / l2_norm(raw)
    return CoherentState(alpha=alpha, state=raw * norm_constant, norm_constant=norm_constant)


def eigenstate_residual(cs: CoherentState, ls: LadderSystem) -> float:
    """‖Â|α⟩ - α|α⟩‖ / max(|α|, 1)"""
    residual = apply_A(ls, cs.state) - cs.alpha * cs.state
    return l2_norm(residual) / max(abs(cs.alpha), 1.0)


def uncertainty_report(cs: CoherentState, ls: LadderSystem) -> UncertaintyReport:
    """
    φ と Π の平均・分散、積、交換子の期待値をすべて数値積分で求める

    ⟨Π²⟩ は ⟨Πs, Πs⟩ で計算する（2階微分を使わない）
    """
    s = cs.state
    x = s.grid.x
    phi = ls.phi(x)
    pi_s = apply_Pi(ls, s)

    mean_phi = inner_product(s, phi * s).real
    mean_pi = inner_product(s, pi_s).real
    second_phi = inner_product(s, phi * phi * s).real
    second_pi = inner_product(pi_s, pi_s).real
    var_phi = max(second_phi - mean_phi ** 2, 0.0)
    var_pi = max(second_pi - mean_pi ** 2, 0.0)
    commutator_mean = inner_product(s, ls.commutator_weight(x) * s).real

    product = var_phi * var_pi
    bound = 0.25 * commutator_mean ** 2
    return UncertaintyReport(
        mean_phi=mean_phi,
        mean_pi=mean_pi,
        var_phi=var_phi,
        var_pi=var_pi,
        product=product,
        commutator_mean=commutator_mean,
        bound=bound,
        equality_gap=abs(product - bound),
    )


# ---------------------------------------------------------------------------
# 分布ごとの閉形式（mass_profiles を通さずに直接書いたもの）
# ---------------------------------------------------------------------------

def _closed_form_mapping(problem: PdmProblem, x: np.ndarray):
    profile = problem.profile
    g = profile.gamma
    if profile.kind is ProfileKind.CONSTANT:
        return x, np.ones_like(x)
    if profile.kind is ProfileKind.CASE1:
        return x + (g - 1.0) * np.arctan(x), np.sqrt((g + x * x) / (1.0 + x * x))
    if profile.kind is ProfileKind.CASE2:
        if g < SMALL_GAMMA:
            return x * (1.0 + (g * x) ** 2 / 6.0), np.sqrt(np.cosh(g * x))
        return np.sinh(g * x) / g, np.sqrt(np.cosh(g * x))
    raise InvalidArgumentError("custom 分布には閉形式のコヒーレント状態がありません")


def closed_form_coherent(problem: PdmProblem, alpha: complex, grid: Grid) -> GridFunction:
    """
    分布ごとに展開したコヒーレント状態
    N_0 m^{1/4} exp[-F(F - 2√2α)/2]（非線形振動子はさらに 1/(1+2F²)）を規格化したもの
    """
    x = grid.x
    F, quarter_mass = _closed_form_mapping(problem, x)
    values = quarter_mass * np.exp(-0.5 * F * (F - 2.0 * _SQRT2 * complex(alpha)))
    if problem.reference.kind is ReferenceKind.NONLINEAR:
        values = values / (1.0 + 2.0 * F * F)
    raw = GridFunction(grid, values)
    return raw / l2_norm(raw)


# ---------------------------------------------------------------------------
# Perelomov 型
# ---------------------------------------------------------------------------

def perelomov_coefficients(alpha: complex, n_max: int) -> np.ndarray:
    """e^{-|α|²/2} α^n / √n! を対数空間で計算"""
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    if alpha == 0:
        coeffs = np.zeros(n_max + 1, dtype=complex)
        coeffs[0] = 1.0
        return coeffs
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def perelomov_series(problem: PdmProblem, alpha: complex, n_max: int, grid: Grid) -> GridFunction:
    """
    変位演算子の展開 e^{-|α|²/2} Σ α^n/√n! ψ̃_n

    Args:
        problem: 調和振動子を参照系とする PDM 問題
        alpha: 複素ラベル
        n_max: 打ち切り次数（≤ 60）
        grid: 奇数点グリッド
    """
    if problem.reference.kind is not ReferenceKind.HARMONIC:
        raise UnsupportedReferenceError("Perelomov 展開は調和振動子の参照系のみ対応（励起状態の閉形式が必要）")
    if int(n_max) != n_max or not 0 <= n_max <= HERMITE_MAX_N:
        raise InvalidArgumentError(f"n_max は 0..{HERMITE_MAX_N}: {n_max}")
    coeffs = perelomov_coefficients(alpha, n_max)
    total = np.zeros(grid.n_points, dtype=complex)
    for n, c in enumerate(coeffs):
        if c == 0:
            continue
        total += c * pdm_eigenfunction(problem, n, grid).values
    return GridFunction(grid, total)


def perelomov_gap(problem: PdmProblem, ls: LadderSystem, alpha: complex, n_max: int, grid: Grid) -> float:
    """
    展開と閉形式の sup ノルム差

    複素 α では両者が大域位相 e^{i Re α Im α} だけずれるので、位相をそろえて比較する
    """
    series = perelomov_series(problem, alpha, n_max, grid)
    closed = make_coherent(problem, ls, alpha, grid).state
    overlap = inner_product(closed, series)
    phase = overlap / abs(overlap) if abs(overlap) > 0.0 else 1.0
    return (series - phase * closed).sup()


@dataclass(frozen=True)
class DisplacementDiagnostics:
    """変位 e^{√2αf} を基底状態に掛けたときの検査結果"""
    alpha: complex
    unitary: bool
    norm_error: Optional[float]
    eigen_residual: float
    pointwise_gap: Optional[float]
    h_commutator_residual: float


def displacement_check(problem: PdmProblem, alpha: complex, grid: Grid,
                       ls: Optional[LadderSystem] = None) -> DisplacementDiagnostics:
    """
    純虚数 α: e^{√2αf}ψ̃_0 が再規格化なしでノルム 1 か（位相を掛けるだけ）、Â の固有値が α か
    一般の α: 再規格化した積が make_coherent と一致するか

    あわせて h = -i√2αf について [h, Â] = iα の残差を記録する
    """
    alpha = complex(alpha)
    ls = ls or build_ladder(problem)
    ground = pdm_eigenfunction(problem, 0, grid)
    x = grid.x
    f = problem.profile.f(x)
    exponent = np.where(ground.values != 0.0, _SQRT2 * alpha * f, 0.0)
    displaced = GridFunction(grid, np.where(ground.values != 0.0, ground.values * np.exp(exponent), 0.0))

    h_values = -1j * _SQRT2 * alpha * f
    commutator = h_values * apply_A(ls, ground) - apply_A(ls, h_values * ground)
    h_residual = l2_norm(commutator - 1j * alpha * ground)

    unitary = alpha.real == 0.0
    if unitary:
        norm_error = abs(l2_norm(displaced) - 1.0)
        residual = apply_A(ls, displaced) - alpha * displaced
        return DisplacementDiagnostics(
            alpha=alpha,
            unitary=True,
            norm_error=norm_error,
            eigen_residual=l2_norm(residual) / max(abs(alpha), 1.0),
            pointwise_gap=None,
            h_commutator_residual=h_residual,
        )

    renormalized = displaced / l2_norm(displaced)
    reference = make_coherent(problem, ls, alpha, grid).state
    residual = apply_A(ls, renormalized) - alpha * renormalized
    return DisplacementDiagnostics(
        alpha=alpha,
        unitary=False,
        norm_error=None,
        eigen_residual=l2_norm(residual) / max(abs(alpha), 1.0),
        pointwise_gap=(renormalized - reference).sup(),
        h_commutator_residual=h_residual,
    )


# ---------------------------------------------------------------------------
# α スイープ
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaResult:
    alpha: complex
    state: Optional[CoherentState]
    eigen_residual: Optional[float]
    uncertainty: Optional[UncertaintyReport]
    perelomov_gap: Optional[float]
    displacement: Optional[DisplacementDiagnostics]
    error: Optional[str] = None


def evaluate_alpha(problem: PdmProblem, ls: LadderSystem, alpha: complex, grid: Grid,
                   n_max: int = 40) -> AlphaResult:
    """1つの α についての検査一式（失敗は error に記録して返す）"""
    alpha = complex(alpha)
    try:
        cs = make_coherent(problem, ls, alpha, grid)
        gap = None
        if problem.reference.kind is ReferenceKind.HARMONIC:
            gap = perelomov_gap(problem, ls, alpha, n_max, grid)
        return AlphaResult(
            alpha=alpha,
            state=cs,
            eigen_residual=eigenstate_residual(cs, ls),
            uncertainty=uncertainty_report(cs, ls),
            perelomov_gap=gap,
            displacement=displacement_check(problem, alpha, grid, ls),
        )
    except PdmError as e:
        return AlphaResult(alpha=alpha, state=None, eigen_residual=None, uncertainty=None,
                           perelomov_gap=None, displacement=None, error=str(e))


def alpha_sweep(problem: PdmProblem, ls: LadderSystem, alphas: Sequence[complex], grid: Grid,
                n_max: int = 40, workers: int = 1) -> List[AlphaResult]:
    """
    複数の α を評価（workers > 1 ならスレッドで並列、結果は入力順）
    """
    def run(alpha):
        return evaluate_alpha(problem, ls, alpha, grid, n_max)

    if workers <= 1:
        return [run(a) for a in alphas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, alphas))
