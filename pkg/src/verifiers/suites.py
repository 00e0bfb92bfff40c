#!/usr/bin/env python3
"""
検証スイート
spectrum / coherent / verify-all の各コマンドの中身（結果は Report にまとめる）
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.analyzers.spectral_check import convergence_order, spectrum_report
from src.numerics.grid import Grid, GridFunction, l2_norm
from src.physics.coherent import (
    AlphaResult,
    alpha_sweep,
    make_coherent,
    perelomov_gap,
)
from src.physics.ladder import (
    apply_A,
    build_ladder,
    commutator_residual,
    factorization_residual,
    hamiltonian_commutator_residuals,
    second_solution,
    second_solution_residual,
)
from src.physics.mass_profiles import ProfileDiagnostics, make_profile, verify_profile
from src.physics.pct_solver import (
    PdmProblem,
    ReferenceKind,
    make_problem,
    pdm_eigenfunction,
    rescale_grid,
)
from src.utils.errors import PdmError
from src.utils.infoclass import Report, RunConfig

_SQRT2 = math.sqrt(2.0)

# verify-all で回す質量分布
PROFILE_SETTINGS: List[Tuple[str, float]] = [
    ("constant", 0.0),
    ("case1", 0.5),
    ("case1", 2.0),
    ("case2", 0.25),
    ("case2", 0.75),
]
VERIFY_ALPHAS = [0.3 + 0.0j, 0.4j, 0.3 + 0.2j]
# [H, Â] は H の2階微分を重ねるぶん緩める
H_COMMUTATOR_TOLERANCE = 1e-3
# |f' - √m| の許容値
MAPPING_TOLERANCE = 1e-6


def _label(kind: str, gamma: float) -> str:
    return kind if kind == "constant" else f"{kind}(γ={gamma:g})"


def build_problem(reference: str, kind: str, gamma: float) -> PdmProblem:
    return make_problem(reference, make_profile(kind, gamma))


def config_grid(config: RunConfig) -> Grid:
    return Grid(config.x_min, config.x_max, config.n_points)


def smooth_bump(grid: Grid, seed: int = 0) -> GridFunction:
    """乱数で中心と幅を選んだ滑らかな局在関数（ノルム1）"""
    rng = np.random.default_rng(seed)
    center = rng.uniform(-1.0, 1.0)
    width = rng.uniform(0.7, 1.2)
    raw = grid.sample(lambda x: np.exp(-((x - center) / width) ** 2))
    return raw / l2_norm(raw)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def cmd_spectrum(config: RunConfig) -> Report:
    """離散ハミルトニアンの下から k 個の固有値を閉形式と比較"""
    problem = build_problem(config.reference, config.profile, config.gamma)
    report = Report(command="spectrum", config=config.to_json())
    tolerance = config.tolerance("spectrum")
    result = spectrum_report(problem, config_grid(config), config.k)
    for row in result.rows:
        report.add(f"spectrum.n{row.n}", row.gap, tolerance, analytic=row.analytic, discrete=row.discrete)
    return report


# ---------------------------------------------------------------------------
# coherent
# ---------------------------------------------------------------------------

def _record_alpha(report: Report, prefix: str, result: AlphaResult, harmonic: bool,
                  config: RunConfig):
    if result.error is not None:
        report.fail(f"{prefix}.state", result.error)
        return

    tol = config.tolerance
    alpha = result.alpha
    u = result.uncertainty
    report.add(f"{prefix}.eigenstate", result.eigen_residual, tol("eigenstate"))
    report.add(
        f"{prefix}.uncertainty_equality",
        u.relative_gap,
        tol("equality"),
        product=u.product,
        bound=u.bound,
        var_phi=u.var_phi,
        var_pi=u.var_pi,
    )
    report.add(f"{prefix}.mean_phi", abs(u.mean_phi - _SQRT2 * alpha.real), tol("moments"), mean_phi=u.mean_phi)
    report.add(f"{prefix}.mean_pi", abs(u.mean_pi - _SQRT2 * alpha.imag), tol("moments"), mean_pi=u.mean_pi)
    if harmonic:
        report.add(
            f"{prefix}.harmonic_variances",
            max(abs(u.var_phi - 0.5), abs(u.var_pi - 0.5), abs(u.product - 0.25)),
            tol("harmonic_moments"),
        )
        report.add(f"{prefix}.perelomov", result.perelomov_gap, tol("perelomov"), n_max=config.n_max)

    d = result.displacement
    if d.unitary:
        report.add(f"{prefix}.displacement_norm", d.norm_error, tol("eigenstate"))
    else:
        report.add(f"{prefix}.displacement_gap", d.pointwise_gap, tol("eigenstate"))
    report.add(f"{prefix}.displacement_eigenstate", d.eigen_residual, tol("eigenstate"))
    report.add(f"{prefix}.h_commutator", d.h_commutator_residual, tol("commutator"))


def density_frame(grid: Grid, results: List[AlphaResult]) -> pd.DataFrame:
    """|⟨x|α⟩|² をプロット用の列にまとめる（失敗した α は NaN）"""
    columns: Dict[str, np.ndarray] = {"x": np.asarray(grid.x)}
    for i, result in enumerate(results):
        if result.state is None:
            columns[f"density_alpha{i}"] = np.full(grid.n_points, np.nan)
        else:
            columns[f"density_alpha{i}"] = np.abs(result.state.state.values) ** 2
    return pd.DataFrame(columns)


def cmd_coherent(config: RunConfig) -> Tuple[Report, Optional[pd.DataFrame]]:
    """
    各 α について固有状態残差・不確定性・Perelomov（調和のみ）・変位を検査

    Returns:
        (Report, 密度の DataFrame または None)
    """
    config.require_alphas()
    problem = build_problem(config.reference, config.profile, config.gamma)
    ls = build_ladder(problem)
    grid = config_grid(config)
    report = Report(command="coherent", config=config.to_json())

    results = alpha_sweep(problem, ls, config.alphas, grid, n_max=config.n_max, workers=config.workers)
    harmonic = problem.reference.kind is ReferenceKind.HARMONIC
    for i, result in enumerate(results):
        _record_alpha(report, f"alpha{i}", result, harmonic, config)

    density = density_frame(grid, results) if config.dump_density else None
    return report, density


# ---------------------------------------------------------------------------
# verify-all
# ---------------------------------------------------------------------------

def _spectrum_checks(report: Report, base: Grid, tolerance: float):
    cases = [
        ("harmonic", "constant", 0.0, 5),
        ("harmonic", "case1", 2.0, 5),
        ("harmonic", "case2", 0.75, 5),
        ("nonlinear", "constant", 0.0, 4),
        ("nonlinear", "case1", 2.0, 4),
    ]
    for reference, kind, gamma, k in cases:
        problem = build_problem(reference, kind, gamma)
        result = spectrum_report(problem, rescale_grid(problem, base), k)
        report.add(
            f"spectrum.{reference}.{_label(kind, gamma)}",
            result.max_gap,
            tolerance,
            levels=[row.discrete for row in result.rows],
        )

    problem = build_problem("harmonic", "constant", 0.0)
    order = convergence_order(problem, (base.n_points + 1) // 2, k=3, domain=base)
    report.add("spectrum.convergence_order", order, passed=bool(abs(order - 2.0) < 0.5))


def record_profile(report: Report, name: str, diagnostics: ProfileDiagnostics):
    """m > 0・単調性に加えて |f' - √m| を許容値と比べる"""
    residual = diagnostics.mapping_residual
    mapping_ok = residual is not None and residual < MAPPING_TOLERANCE
    report.add(name, residual, MAPPING_TOLERANCE, passed=diagnostics.ok and mapping_ok,
               mass_derivative_residual=diagnostics.mass_derivative_residual)


def _operator_checks(report: Report, base: Grid, config: RunConfig, workers: int):
    tol = config.tolerance
    for reference in ("harmonic", "nonlinear"):
        harmonic = reference == "harmonic"
        for kind, gamma in PROFILE_SETTINGS:
            problem = build_problem(reference, kind, gamma)
            grid = rescale_grid(problem, base)
            ls = build_ladder(problem)
            name = f"{reference}.{_label(kind, gamma)}"

            record_profile(report, f"profile.{name}", verify_profile(problem.profile, grid))

            ground = pdm_eigenfunction(problem, 0, grid)
            bump = smooth_bump(grid)
            report.add(f"annihilation.{name}", l2_norm(apply_A(ls, ground)) / l2_norm(ground), tol("annihilation"))

            states = {"ground": ground, "bump": bump}
            if harmonic:
                states["n2"] = pdm_eigenfunction(problem, 2, grid)
            for state_name, g in states.items():
                report.add(f"factorization.{name}.{state_name}", factorization_residual(ls, problem, g),
                           tol("factorization"))
            for state_name in ("ground", "bump"):
                report.add(f"commutator.{name}.{state_name}", commutator_residual(ls, states[state_name]),
                           tol("commutator"))

            results = alpha_sweep(problem, ls, VERIFY_ALPHAS, grid, n_max=config.n_max, workers=workers)
            for i, result in enumerate(results):
                _record_alpha(report, f"coherent.{name}.alpha{i}", result, harmonic, config)


def _hamiltonian_commutator_checks(report: Report, base: Grid):
    for reference in ("harmonic", "nonlinear"):
        problem = build_problem(reference, "case1", 2.0)
        grid = rescale_grid(problem, base)
        res_a, res_adag = hamiltonian_commutator_residuals(build_ladder(problem), problem, smooth_bump(grid))
        report.add(f"h_commutator.{reference}.A", res_a, H_COMMUTATOR_TOLERANCE)
        report.add(f"h_commutator.{reference}.A_dagger", res_adag, H_COMMUTATOR_TOLERANCE)


def _perelomov_checks(report: Report, base: Grid, tolerance: float):
    problem = build_problem("harmonic", "case1", 2.0)
    grid = rescale_grid(problem, base)
    ls = build_ladder(problem)
    gaps = [perelomov_gap(problem, ls, 0.8, n, grid) for n in (10, 20, 40)]
    report.add("perelomov.case1(γ=2).n40", gaps[-1], tolerance, gaps=gaps)
    report.add("perelomov.monotone", None, passed=bool(gaps[0] > gaps[1] >= gaps[2]), gaps=gaps)


def _reduction_checks(report: Report, base: Grid, tolerance: float):
    for reference in ("harmonic", "nonlinear"):
        constant = build_problem(reference, "constant", 0.0)
        expected = make_coherent(constant, build_ladder(constant), 0.5, base).state
        for kind, gamma in (("case1", 1.0), ("case2", 1e-8)):
            problem = build_problem(reference, kind, gamma)
            state = make_coherent(problem, build_ladder(problem), 0.5, base).state
            report.add(f"reduction.{reference}.{_label(kind, gamma)}", (state - expected).sup(), tolerance)


def _second_solution_checks(report: Report, base: Grid, tolerance: float):
    for kind, gamma in (("constant", 0.0), ("case2", 0.5)):
        problem = build_problem("harmonic", kind, gamma)
        coarse = rescale_grid(problem, base)
        grid = Grid(coarse.x_min, coarse.x_max, 2 * coarse.n_points - 1)
        ls = build_ladder(problem)
        solution = second_solution(pdm_eigenfunction(problem, 0, grid), problem.profile)
        report.add(f"second_solution.{_label(kind, gamma)}", second_solution_residual(ls, solution), tolerance,
                   interval=[solution.u_tilde.grid.x_min, solution.u_tilde.grid.x_max])


def cmd_verify_all(config: RunConfig,
                   progress: Optional[Callable[[str], None]] = None) -> Report:
    """
    受け入れ条件一式を実行して1つの Report にまとめる

    グリッドは設定の刻みを保ったまま各質量分布に合わせて広げる
    """
    report = Report(command="verify-all", config=config.to_json())
    base = config_grid(config)
    tol = config.tolerance
    steps = [
        ("spectrum", lambda: _spectrum_checks(report, base, tol("spectrum"))),
        ("operators", lambda: _operator_checks(report, base, config, config.workers)),
        ("h_commutator", lambda: _hamiltonian_commutator_checks(report, base)),
        ("perelomov", lambda: _perelomov_checks(report, base, tol("perelomov"))),
        ("reduction", lambda: _reduction_checks(report, base, tol("reduction"))),
        ("second_solution", lambda: _second_solution_checks(report, base, tol("second_solution"))),
    ]
    for title, step in steps:
        if progress:
            progress(title)
        try:
            step()
        except PdmError as e:
            report.fail(f"{title}.error", str(e))
    return report


def report_frame(report: Report) -> pd.DataFrame:
    """チェック結果を CSV 用の表に"""
    rows = []
    for check in report.checks:
        value = check.value
        if isinstance(value, complex):
            value = abs(value)
        rows.append({
            "name": check.name,
            "value": value,
            "tolerance": check.tolerance,
            "passed": check.passed,
        })
    return pd.DataFrame(rows, columns=["name", "value", "tolerance", "passed"])
