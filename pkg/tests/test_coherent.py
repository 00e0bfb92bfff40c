"""
コヒーレント状態のテスト
"""
import math

import numpy as np
import pytest

from conftest import problem_for
from src.numerics.grid import Grid, inner_product, l2_norm
from src.physics.coherent import (
    alpha_sweep,
    closed_form_coherent,
    displacement_check,
    eigenstate_residual,
    evaluate_alpha,
    make_coherent,
    perelomov_coefficients,
    perelomov_gap,
    perelomov_series,
    uncertainty_report,
)
from src.physics.ladder import build_ladder
from src.physics.mass_profiles import custom_profile
from src.physics.pct_solver import default_grid, make_problem, pdm_eigenfunction
from src.utils.errors import DomainTooSmallError, InvalidArgumentError, UnsupportedReferenceError

PROFILES = [("constant", 0.0), ("case1", 0.5), ("case1", 2.0), ("case2", 0.25), ("case2", 0.75)]
ALPHAS = [0.3, 0.4j, 0.3 + 0.2j]


def coherent_for(reference, kind, gamma, alpha, grid=None):
    problem = problem_for(reference, kind, gamma)
    ls = build_ladder(problem)
    grid = grid or default_grid(problem)
    return problem, ls, make_coherent(problem, ls, alpha, grid)


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", PROFILES)
def test_eigenstate_property(reference, kind, gamma):
    for alpha in ALPHAS:
        _, ls, cs = coherent_for(reference, kind, gamma, alpha)
        assert l2_norm(cs.state) == pytest.approx(1.0, abs=1e-8)
        assert eigenstate_residual(cs, ls) < 1e-5


def test_eigenstate_residual_examples():
    _, ls, cs = coherent_for("harmonic", "case1", 2.0, 0.3 + 0.2j)
    assert eigenstate_residual(cs, ls) < 1e-6
    _, ls, cs = coherent_for("harmonic", "case2", 1.0, 1.0)
    assert eigenstate_residual(cs, ls) < 1e-6
    _, ls, cs = coherent_for("nonlinear", "constant", 0.0, 0.4j)
    assert eigenstate_residual(cs, ls) < 1e-5


def test_alpha_zero_is_ground_state(standard_grid):
    problem, ls, cs = coherent_for("harmonic", "case1", 2.0, 0.0, standard_grid)
    ground = pdm_eigenfunction(problem, 0, standard_grid)
    assert (cs.state - ground).sup() < 1e-12


def test_constant_mass_state_is_shifted_gaussian(standard_grid):
    _, _, cs = coherent_for("harmonic", "constant", 0.0, 0.5, standard_grid)
    x = standard_grid.x
    shifted = np.pi ** -0.25 * np.exp(-(x - math.sqrt(2.0) * 0.5) ** 2 / 2)
    assert np.max(np.abs(cs.state.values - shifted)) < 1e-10


def test_harmonic_norm_constant(standard_grid):
    for alpha in (0.5, 0.3 + 0.7j, -0.4):
        _, _, cs = coherent_for("harmonic", "case1", 2.0, alpha, standard_grid)
        assert cs.norm_constant == pytest.approx(math.exp(-complex(alpha).real ** 2), rel=1e-10)


def test_envelope_guard(standard_grid):
    problem = problem_for("harmonic", "constant")
    ls = build_ladder(problem)
    with pytest.raises(DomainTooSmallError):
        make_coherent(problem, ls, 10.0, standard_grid)
    # 虚部は包絡線を動かさない
    make_coherent(problem, ls, 10.0j, standard_grid)


@pytest.mark.parametrize("kind,gamma", PROFILES)
def test_harmonic_uncertainty_is_minimal(kind, gamma):
    for alpha in ALPHAS:
        _, ls, cs = coherent_for("harmonic", kind, gamma, alpha)
        report = uncertainty_report(cs, ls)
        assert report.var_phi == pytest.approx(0.5, abs=1e-8)
        assert report.var_pi == pytest.approx(0.5, abs=1e-8)
        assert report.product == pytest.approx(0.25, abs=1e-8)
        assert report.commutator_mean == pytest.approx(1.0, abs=1e-12)


def test_harmonic_case2_gamma1_product(standard_grid):
    _, ls, cs = coherent_for("harmonic", "case2", 1.0, 0.5, standard_grid)
    report = uncertainty_report(cs, ls)
    assert report.product == pytest.approx(0.25, abs=1e-8)
    assert report.mean_phi == pytest.approx(math.sqrt(2.0) * 0.5, abs=1e-7)
    assert report.mean_pi == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize("kind,gamma", PROFILES)
def test_nonlinear_uncertainty_equality(kind, gamma):
    for alpha in ALPHAS:
        _, ls, cs = coherent_for("nonlinear", kind, gamma, alpha)
        report = uncertainty_report(cs, ls)
        assert report.relative_gap < 1e-6
        assert report.var_phi == pytest.approx(0.5 * report.commutator_mean, abs=1e-7)


def test_nonlinear_ground_state_moments(standard_grid):
    _, ls, cs = coherent_for("nonlinear", "constant", 0.0, 0.0, standard_grid)
    report = uncertainty_report(cs, ls)
    weight = standard_grid.sample(lambda y: 1.0 + 4.0 * (1.0 - 2.0 * y * y) / (1.0 + 2.0 * y * y) ** 2)
    expected = 0.5 * inner_product(cs.state, weight * cs.state).real
    assert report.product == pytest.approx(report.bound, abs=1e-8)
    assert report.bound == pytest.approx(expected ** 2, abs=1e-12)
    assert abs(report.mean_phi) < 1e-12


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", [("constant", 0.0), ("case1", 2.0), ("case2", 0.75)])
def test_moment_identities(reference, kind, gamma):
    for alpha in ALPHAS:
        _, ls, cs = coherent_for(reference, kind, gamma, alpha)
        report = uncertainty_report(cs, ls)
        assert report.mean_phi == pytest.approx(math.sqrt(2.0) * complex(alpha).real, abs=1e-7)
        assert report.mean_pi == pytest.approx(math.sqrt(2.0) * complex(alpha).imag, abs=1e-7)


@pytest.mark.parametrize("reference,kind,gamma", [
    ("harmonic", "case1", 2.0),
    ("nonlinear", "case1", 2.0),
    ("harmonic", "case2", 0.75),
    ("nonlinear", "constant", 0.0),
])
def test_closed_form_matches(reference, kind, gamma, standard_grid):
    problem, ls, cs = coherent_for(reference, kind, gamma, 0.3 + 0.2j, standard_grid)
    closed = closed_form_coherent(problem, 0.3 + 0.2j, standard_grid)
    assert (closed - cs.state).sup() < 1e-10


def test_closed_form_requires_analytic_profile(standard_grid):
    problem = make_problem("harmonic", custom_profile(lambda x: 1.0 + 0.1 * x ** 2))
    with pytest.raises(InvalidArgumentError):
        closed_form_coherent(problem, 0.5, standard_grid)


def test_perelomov_coefficients():
    assert perelomov_coefficients(1.0, 2)[2] == pytest.approx(math.exp(-0.5) / math.sqrt(2.0))
    coeffs = perelomov_coefficients(0.8, 40)
    assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(1.0, abs=1e-12)
    zero = perelomov_coefficients(0.0, 5)
    assert zero[0] == 1.0 and np.all(zero[1:] == 0.0)
    # n = 60 でもオーバーフローしない
    assert np.all(np.isfinite(perelomov_coefficients(5.0 + 5.0j, 60)))


def test_perelomov_series_matches_closed_form(standard_grid):
    problem = problem_for("harmonic", "case1", 2.0)
    ls = build_ladder(problem)
    gaps = [perelomov_gap(problem, ls, 0.8, n, standard_grid) for n in (10, 20, 40)]
    assert gaps[-1] < 1e-6
    assert gaps[0] > gaps[1] >= gaps[2]

    assert perelomov_gap(problem, ls, 0.3 + 0.2j, 40, standard_grid) < 1e-6


def test_perelomov_series_edge_cases(standard_grid):
    problem = problem_for("harmonic", "case2", 0.75)
    ground = pdm_eigenfunction(problem, 0, standard_grid)
    assert (perelomov_series(problem, 0.0, 7, standard_grid) - ground).sup() < 1e-14
    with pytest.raises(InvalidArgumentError):
        perelomov_series(problem, 0.5, 61, standard_grid)
    with pytest.raises(UnsupportedReferenceError):
        perelomov_series(problem_for("nonlinear", "constant"), 0.5, 10, standard_grid)


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
def test_constant_mass_reduction(reference, standard_grid):
    constant = problem_for(reference, "constant")
    expected = make_coherent(constant, build_ladder(constant), 0.5, standard_grid).state
    for kind, gamma in (("case1", 1.0), ("case2", 1e-8)):
        _, _, cs = coherent_for(reference, kind, gamma, 0.5, standard_grid)
        assert (cs.state - expected).sup() < 1e-8


def test_displacement_imaginary_alpha(standard_grid):
    problem = problem_for("harmonic", "case2", 0.5)
    diagnostics = displacement_check(problem, 0.7j, standard_grid)
    assert diagnostics.unitary
    assert diagnostics.norm_error < 1e-10
    assert diagnostics.eigen_residual < 1e-6
    assert diagnostics.pointwise_gap is None
    assert diagnostics.h_commutator_residual < 1e-4


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
def test_displacement_general_alpha(reference, standard_grid):
    problem = problem_for(reference, "case1", 2.0)
    diagnostics = displacement_check(problem, 0.5, standard_grid)
    assert not diagnostics.unitary
    assert diagnostics.norm_error is None
    assert diagnostics.pointwise_gap < 1e-12
    assert diagnostics.eigen_residual < 1e-5
    assert diagnostics.h_commutator_residual < 1e-4


def test_alpha_sweep_threads_match_sequential(standard_grid):
    problem = problem_for("harmonic", "case1", 2.0)
    ls = build_ladder(problem)
    alphas = [0.3, 0.4j, 0.3 + 0.2j, 0.1 - 0.5j]
    sequential = alpha_sweep(problem, ls, alphas, standard_grid, n_max=20, workers=1)
    threaded = alpha_sweep(problem, ls, alphas, standard_grid, n_max=20, workers=4)
    assert [r.alpha for r in threaded] == [complex(a) for a in alphas]
    for a, b in zip(sequential, threaded):
        assert a.eigen_residual == b.eigen_residual
        assert a.perelomov_gap == b.perelomov_gap
        assert np.array_equal(a.state.state.values, b.state.state.values)


def test_evaluate_alpha_records_failure():
    problem = problem_for("harmonic", "constant")
    grid = Grid(-5.0, 5.0, 1001)
    result = evaluate_alpha(problem, build_ladder(problem), 5.0, grid)
    assert result.state is None
    assert result.error
    assert result.uncertainty is None
