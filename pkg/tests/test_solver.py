import math
from fractions import Fraction

import numpy as np
import pytest

from boxforms.fields import constant_solution, manufactured
from boxforms.forms import CellBox, PolyForm, Polynomial
from boxforms.mesh import build_grid
from boxforms.solver import (Solution, assemble, broken_error, build_solver_space,
                             conjugate_gradient, consistency_residual,
                             convergence_sweep, local_energy_matrix, solve)
from boxforms.spaces import P1MINUS, basis
from boxforms.whitney import FULL_TEST, INTERIOR_TEST, prune_vectors, interpolated_generating_set, PiecewiseWhitney


def test_local_energy_matrix_interval_oracle():
    """Single cell [0,1], scalar case: hand-integrated stiffness + mass."""
    cell = CellBox((0,), (1,))
    rows = local_energy_matrix(basis(P1MINUS, 0, cell), cell)
    assert rows == [[Fraction(1), Fraction(0)],
                    [Fraction(0), Fraction(13, 12)]]


def test_top_degree_gram_is_cell_volumes():
    mesh = build_grid([[0, 1], [0, 2]], (2, 2))
    space = build_solver_space(2, mesh, INTERIOR_TEST, "kernel")
    problem = assemble(space, PolyForm.covector(2, (1, 2), 1))
    # kernel basis of the unconstrained top space is one indicator per cell
    volumes = sorted(float(c.volume) for c in mesh.cells)
    diag = sorted(np.diag(problem.G))
    assert np.allclose(diag, volumes)
    assert np.allclose(problem.G, np.diag(np.diag(problem.G)))


def test_gram_symmetry():
    mesh = build_grid([[0, 1], [0, 1]], (3, 3))
    space = build_solver_space(0, mesh, INTERIOR_TEST)
    problem = assemble(space, PolyForm.from_scalar(
        Polynomial.constant(2, 1)))
    asym = np.max(np.abs(problem.G - problem.G.T))
    assert asym == 0.0
    for i in range(problem.size):
        for j in range(problem.size):
            assert problem.G_exact[i][j] == problem.G_exact[j][i]


def test_dependent_basis_rejected():
    mesh = build_grid([[0, 1], [0, 1]], (2, 2))
    gens = interpolated_generating_set(0, mesh, INTERIOR_TEST)
    with pytest.raises(ValueError, match="prune"):
        assemble(gens, PolyForm.from_scalar(
            Polynomial.constant(2, 1)))


def test_zero_load_gives_zero_solution():
    mesh = build_grid([[0, 1]], (4,))
    space = build_solver_space(0, mesh, INTERIOR_TEST)
    problem = assemble(space, PolyForm.zero(1, 0))
    sol = solve(problem)
    assert np.allclose(sol.x, 0)


def test_exact_solution_satisfies_galerkin_orthogonality():
    mesh = build_grid([[0, 1], [0, 1]], (2, 2))
    space = build_solver_space(1, mesh, INTERIOR_TEST)
    load = PolyForm.covector(2, (1,), 2)
    problem = assemble(space, load)
    sol = solve(problem, method="exact")
    residual = [sum(g * x for g, x in zip(row, sol.x_exact)) - f
                for row, f in zip(problem.G_exact, problem.F_exact)]
    assert all(r == 0 for r in residual)


def test_energy_minimality_of_exact_solution():
    import random
    rng = random.Random(5)
    mesh = build_grid([[0, 1], [0, 1]], (2, 2))
    space = build_solver_space(0, mesh, INTERIOR_TEST)
    load = PolyForm.from_scalar(
        Polynomial.constant(2, 1))
    problem = assemble(space, load)
    sol = solve(problem, method="exact")

    def energy(vec):
        quad = sum(vec[i] * sum(problem.G_exact[i][j] * vec[j] for j in range(len(vec)))
                   for i in range(len(vec)))
        lin = sum(f * v for f, v in zip(problem.F_exact, vec))
        return Fraction(1, 2) * quad - lin

    base = energy(sol.x_exact)
    for _ in range(5):
        perturbation = [Fraction(rng.randint(-2, 2), rng.randint(1, 3))
                        for _ in sol.x_exact]
        shifted = [a + b for a, b in zip(sol.x_exact, perturbation)]
        assert energy(shifted) >= base


def test_cg_matches_exact_solve():
    mesh = build_grid([[0, 1], [0, 1]], (3, 3))
    space = build_solver_space(0, mesh, INTERIOR_TEST)
    load = PolyForm.from_scalar(
        Polynomial.constant(2, 2))
    problem = assemble(space, load)
    exact = solve(problem, method="exact")
    iterative = solve(problem, method="cg")
    diff = exact.x - iterative.x
    rel = problem.energy_norm(diff) / problem.energy_norm(exact.x)
    assert rel < 1e-9
    assert iterative.history[-1] <= 1e-12


def test_cg_failure_reports_history():
    gram = np.array([[2.0, 0.3], [0.3, 0.5]])
    with pytest.raises(RuntimeError, match="residual"):
        conjugate_gradient(gram, np.array([1.0, 1.0]), rtol=1e-14, maxiter=1)


def test_constant_reproduction_small():
    mesh = build_grid([[0, 1], [0, 1]], (4, 4))
    entry = constant_solution(2, 1, (2,), 5.0)
    space = build_solver_space(1, mesh, INTERIOR_TEST)
    problem = assemble(space, entry.load)
    sol = solve(problem)
    _, err = broken_error(entry.omega, sol)
    assert err < 1e-10


def test_error_norm_scaling():
    mesh = build_grid([[0, 1], [0, 1]], (2, 2))
    space = build_solver_space(0, mesh, INTERIOR_TEST)
    problem = assemble(space, manufactured("sin2d_k0").load)
    zero = Solution(space, problem, np.zeros(space.dim))
    entry = manufactured("sin2d_k0")
    scaled = constant_solution(2, 0, (), 1.0)  # reuse the container shape

    e1_l2, e1_hd = broken_error(entry.omega, zero)

    import boxforms.fields as fields
    doubled = fields.FormField(
        2, 0,
        {a: (lambda pts, fn=fn: 2 * fn(pts)) for a, fn in entry.omega.components.items()},
        {a: (lambda pts, fn=fn: 2 * fn(pts)) for a, fn in entry.omega.d_components.items()})
    e2_l2, e2_hd = broken_error(doubled, zero)
    assert e2_l2 == pytest.approx(2 * e1_l2, rel=1e-12)
    assert e2_hd == pytest.approx(2 * e1_hd, rel=1e-12)


def test_error_quadrature_self_consistency():
    mesh = build_grid([[0, 1], [0, 1]], (4, 4))
    entry = manufactured("sin2d_k0")
    space = build_solver_space(0, mesh, FULL_TEST)
    problem = assemble(space, entry.load)
    sol = solve(problem)
    e5 = broken_error(entry.omega, sol, quad_order=5)
    e10 = broken_error(entry.omega, sol, quad_order=10)
    assert e5[0] == pytest.approx(e10[0], rel=1e-8)
    assert e5[1] == pytest.approx(e10[1], rel=1e-8)


def test_consistency_residual_zero_for_constants():
    mesh = build_grid([[0, 1], [0, 1]], (3, 3))
    entry = constant_solution(2, 0, (), 4.0)
    space = build_solver_space(0, mesh, INTERIOR_TEST)
    problem = assemble(space, entry.load)
    assert consistency_residual(entry, problem) == 0.0


def test_consistency_residual_zero_when_scheme_is_conforming():
    # at top-minus-one degree in 2d with full tests the glued space is
    # trace-continuous, so the nonconformity functional vanishes
    entry = manufactured("sin2d_k1")
    mesh = build_grid(entry.domain, (4, 4))
    space = build_solver_space(1, mesh, FULL_TEST)
    problem = assemble(space, entry.load)
    assert consistency_residual(entry, problem) < 1e-9


def test_sweep_structure_and_rates():
    rows = convergence_sweep("sin1d_k0", [4, 8, 16])
    assert [r["level"] for r in rows] == [0, 1, 2]
    assert rows[0]["order_Hd"] is None
    assert rows[-1]["order_Hd"] > 0.8
    assert rows[-1]["err_Hd"] < rows[0]["err_Hd"]


def test_single_level_sweep_has_no_orders():
    rows = convergence_sweep("sin1d_k0", [4])
    assert len(rows) == 1 and rows[0]["order_L2"] is None


def test_top_degree_sweep_mass_only():
    rows = convergence_sweep("sin2d_k2", [2, 4])
    # L2-projection problem: first-order L2 convergence of piecewise constants
    assert rows[-1]["order_L2"] > 0.8
