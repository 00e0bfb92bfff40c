"""
昇降演算子・因数分解・2つ目の解のテスト
"""
import math

import numpy as np
import pytest

from conftest import problem_for
from src.numerics.grid import inner_product, l2_norm
from src.physics.ladder import (
    apply_A,
    apply_A_dagger,
    apply_H,
    apply_Pi,
    build_ladder,
    build_ladder_numeric,
    commutator_residual,
    factorization_residual,
    hamiltonian_commutator_residuals,
    k_from_ground,
    phi_from_eta,
    second_solution,
    second_solution_residual,
)
from src.physics.pct_solver import default_grid, pdm_eigenfunction
from src.utils.errors import DivisionHazardError
from src.verifiers.suites import smooth_bump

PROFILES = [("constant", 0.0), ("case1", 0.5), ("case1", 2.0), ("case2", 0.25), ("case2", 0.75)]


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", PROFILES)
def test_ground_state_is_annihilated(reference, kind, gamma):
    problem = problem_for(reference, kind, gamma)
    grid = default_grid(problem)
    ground = pdm_eigenfunction(problem, 0, grid)
    ls = build_ladder(problem)
    assert l2_norm(apply_A(ls, ground)) / l2_norm(ground) < 1e-6


def test_ladder_lambda():
    assert build_ladder(problem_for("harmonic", "case1", 2.0)).lam == 0.5
    assert build_ladder(problem_for("nonlinear", "case1", 2.0)).lam == -1.5


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", PROFILES)
def test_factorization(reference, kind, gamma):
    problem = problem_for(reference, kind, gamma)
    grid = default_grid(problem)
    ls = build_ladder(problem)
    states = [pdm_eigenfunction(problem, 0, grid), smooth_bump(grid)]
    if reference == "harmonic":
        states.append(pdm_eigenfunction(problem, 2, grid))
    for g in states:
        assert factorization_residual(ls, problem, g) < 1e-4


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", [("constant", 0.0), ("case1", 2.0), ("case2", 0.75)])
def test_commutator(reference, kind, gamma):
    problem = problem_for(reference, kind, gamma)
    grid = default_grid(problem)
    ls = build_ladder(problem)
    assert commutator_residual(ls, smooth_bump(grid)) < 1e-4
    assert commutator_residual(ls, pdm_eigenfunction(problem, 0, grid)) < 1e-4


def test_harmonic_commutator_weight_is_one():
    ls = build_ladder(problem_for("harmonic", "case2", 0.75))
    x = np.linspace(-3.0, 3.0, 13)
    assert np.all(ls.commutator_weight(x) == 1.0)

    nonlinear = build_ladder(problem_for("nonlinear", "constant"))
    # φ'/√m = 1 + 4(1-2f²)/(1+2f²)² は原点で 5
    assert nonlinear.commutator_weight(np.array([0.0]))[0] == pytest.approx(5.0)


def test_raising_operator_steps_up(standard_grid):
    problem = problem_for("harmonic", "case2", 0.5)
    ls = build_ladder(problem)
    for n in range(3):
        raised = apply_A_dagger(ls, pdm_eigenfunction(problem, n, standard_grid))
        expected = math.sqrt(n + 1) * pdm_eigenfunction(problem, n + 1, standard_grid)
        assert (raised - expected).sup() < 1e-6


def test_excited_state_is_eigenfunction_of_H(standard_grid):
    problem = problem_for("harmonic", "case1", 2.0)
    psi2 = pdm_eigenfunction(problem, 2, standard_grid)
    assert l2_norm(apply_H(problem, psi2) - 2.5 * psi2) < 1e-4


def test_momentum_is_hermitian(standard_grid):
    problem = problem_for("harmonic", "case1", 2.0)
    ls = build_ladder(problem)
    g = smooth_bump(standard_grid)
    pi_g = apply_Pi(ls, g)
    # 実関数 g では ⟨g, Πg⟩ = 0
    assert abs(inner_product(g, pi_g)) < 1e-7


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
def test_hamiltonian_commutators(reference, standard_grid):
    problem = problem_for(reference, "case1", 2.0)
    ls = build_ladder(problem)
    res_a, res_adag = hamiltonian_commutator_residuals(ls, problem, smooth_bump(standard_grid))
    assert res_a < 1e-3
    assert res_adag < 1e-3


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", [("constant", 0.0), ("case1", 2.0)])
def test_numeric_superpotential(reference, kind, gamma, fine_grid):
    problem = problem_for(reference, kind, gamma)
    ls = build_ladder(problem)
    numeric = build_ladder_numeric(problem, fine_grid)
    x = numeric.phi.grid.x
    assert np.max(np.abs(numeric.phi.values - ls.phi(x))) < 1e-5
    assert np.max(np.abs(numeric.K.values - ls.K(x))) < 1e-5


def test_k_from_ground_rejects_nodes(standard_grid):
    problem = problem_for("harmonic", "constant")
    with pytest.raises(DivisionHazardError):
        k_from_ground(pdm_eigenfunction(problem, 1, standard_grid))


def test_phi_from_eta_reproduces_superpotential(fine_grid):
    problem = problem_for("harmonic", "case1", 2.0)
    ls = build_ladder(problem)
    solution = second_solution(pdm_eigenfunction(problem, 0, fine_grid), problem.profile)
    phi = phi_from_eta(solution.eta, problem.profile)
    x = phi.grid.x
    assert np.max(np.abs(phi.values[2:-2] - ls.phi(x)[2:-2])) < 1e-5


@pytest.mark.parametrize("kind,gamma", [("constant", 0.0), ("case2", 0.5)])
def test_second_solution(kind, gamma, fine_grid):
    problem = problem_for("harmonic", kind, gamma)
    ls = build_ladder(problem)
    solution = second_solution(pdm_eigenfunction(problem, 0, fine_grid), problem.profile)
    assert solution.u_tilde.grid.n_points % 2 == 1
    assert second_solution_residual(ls, solution) < 1e-4



@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", [("constant", 0.0), ("case1", 2.0), ("case2", 0.75)])
def test_lowering_and_raising_are_adjoint(reference, kind, gamma):
    problem = problem_for(reference, kind, gamma)
    grid = default_grid(problem)
    ls = build_ladder(problem)
    f = smooth_bump(grid, seed=1)
    g = smooth_bump(grid, seed=2) * np.exp(0.3j * grid.x)
    lhs = inner_product(f, apply_A(ls, g))
    rhs = inner_product(apply_A_dagger(ls, f), g)
    assert abs(lhs - rhs) < 1e-6


@pytest.mark.parametrize("reference", ["harmonic", "nonlinear"])
@pytest.mark.parametrize("kind,gamma", [("constant", 0.0), ("case1", 2.0), ("case2", 0.75)])
def test_momentum_from_ladder_operators(reference, kind, gamma, standard_grid):
    ls = build_ladder(problem_for(reference, kind, gamma))
    g = smooth_bump(standard_grid)
    combined = (-1j / math.sqrt(2.0)) * (apply_A(ls, g) - apply_A_dagger(ls, g))
    assert (apply_Pi(ls, g) - combined).sup() < 1e-12


def test_momentum_of_even_state_is_odd(standard_grid):
    problem = problem_for("harmonic", "case1", 2.0)
    ls = build_ladder(problem)
    pi_g = apply_Pi(ls, pdm_eigenfunction(problem, 0, standard_grid)).values
    assert np.all(pi_g.real == 0.0)
    assert np.max(np.abs(pi_g + pi_g[::-1])) < 1e-10


def test_lowering_constant_mass_first_excited_state(standard_grid):
    problem = problem_for("harmonic", "constant")
    ls = build_ladder(problem)
    lowered = apply_A(ls, pdm_eigenfunction(problem, 1, standard_grid))
    assert (lowered - pdm_eigenfunction(problem, 0, standard_grid)).sup() < 1e-6


def test_second_solution_ratio_increases(fine_grid):
    problem = problem_for("harmonic", "case2", 0.5)
    solution = second_solution(pdm_eigenfunction(problem, 0, fine_grid), problem.profile)
    x = solution.eta.grid.x
    # ũ/u = ∫ m/u² は m/u² > 0 なので単調増加
    u = np.sqrt(problem.profile.m(x)) / solution.eta.values
    ratio = (solution.u_tilde.values / u).real
    assert np.all(np.diff(ratio) > 0.0)
