"""In-house dense interior-point solver on small hand-checkable cones."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fracpoly.moments import MatrixSpec, assemble, moment_matrix_spec
from fracpoly.polynomials import enumerate_basis
from fracpoly.sdp import (
    SdpOptions,
    SdpProblem,
    SolveStatus,
    psd_check,
    residuals,
    solve,
    solve_standard_form,
)


def _hankel_problem(c):
    """min c . y over [[y0, y1], [y1, y2]] >= 0 with y0 pinned at 1."""
    spec = moment_matrix_spec(1, 1)
    return SdpProblem(
        num_vars=3,
        objective=np.asarray(c, dtype=float),
        blocks=[spec],
        equalities=[(0, 1.0)],
    )


def test_minimize_top_moment():
    sol = solve(_hankel_problem([0.0, 0.0, 1.0]))
    assert sol.status is SolveStatus.OPTIMAL
    assert abs(sol.objective_value) <= 1e-7
    assert abs(sol.y[0] - 1.0) <= 1e-9


def test_quadratic_completion():
    # min -2 y1 + y2 subject to y2 >= y1^2 has optimum -1 at y1 = 1
    sol = solve(_hankel_problem([0.0, -2.0, 1.0]))
    assert sol.status is SolveStatus.OPTIMAL
    assert abs(sol.objective_value + 1.0) <= 1e-7
    assert abs(sol.y[1] - 1.0) <= 1e-5
    assert abs(sol.y[2] - 1.0) <= 1e-5


def test_solution_is_feasible():
    prob = _hankel_problem([0.0, -2.0, 1.0])
    sol = solve(prob)
    res = residuals(prob, sol)
    assert res["primal_infeas"] <= 1e-8
    assert res["min_block_eig"] >= -1e-8
    m = assemble(prob.blocks[0], sol.y)
    ok, wmin = psd_check(m, tol=1e-8)
    assert ok, f"moment block indefinite: {wmin}"


def test_gap_identity_holds_per_iterate():
    # every logged iterate satisfies
    #   pobj - dobj = <X, S> - y . rp + sum_j <Rd_j, X_j>
    prob = _hankel_problem([0.0, -2.0, 1.0])
    sol = solve(prob)
    assert sol.iterate_log
    for rec in sol.iterate_log:
        lhs = rec.pobj - rec.dobj
        rhs = rec.x_dot_s - rec.y_dot_rp + rec.rd_dot_x
        scale = 1.0 + abs(rec.pobj) + abs(rec.dobj) + abs(rec.x_dot_s)
        assert abs(lhs - rhs) <= 1e-7 * scale, f"iterate {rec.k}"


def test_objective_scaling():
    base = solve(_hankel_problem([0.0, -2.0, 1.0]))
    scaled = solve(_hankel_problem([0.0, -20.0, 10.0]))
    assert math.isclose(
        scaled.objective_value, 10.0 * base.objective_value,
        rel_tol=1e-6, abs_tol=1e-6,
    )


def test_deterministic_reruns():
    a = solve(_hankel_problem([0.0, -2.0, 1.0]))
    b = solve(_hankel_problem([0.0, -2.0, 1.0]))
    assert a.iterations == b.iterations
    assert np.array_equal(a.y, b.y)


def test_infeasible_cone_detected():
    # the extra 1x1 block pins -y0 >= 0 against y0 = 1
    neg = MatrixSpec(
        side=1,
        entries={(0, 0): ((-1.0, 0),)},
        row_basis=enumerate_basis(1, 0),
    )
    prob = SdpProblem(
        num_vars=3,
        objective=np.array([0.0, 0.0, 1.0]),
        blocks=[moment_matrix_spec(1, 1), neg],
        equalities=[(0, 1.0)],
    )
    sol = solve(prob)
    assert sol.status is SolveStatus.INFEASIBLE


def test_unbounded_objective_detected():
    # min -y1 with y2 free: y1 can grow along y2 without leaving the cone
    sol = solve(_hankel_problem([0.0, -1.0, 0.0]))
    assert sol.status is SolveStatus.UNBOUNDED


def test_tolerances_are_respected():
    opts = SdpOptions(feas_tol=1e-10, gap_tol=1e-11)
    sol = solve(_hankel_problem([0.0, -2.0, 1.0]), opts)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.duality_gap <= 1e-9


def test_standard_form_identity_trace():
    # min <I, X> s.t. X11 = 1 over 2x2 PSD has optimum 1 at X = e1 e1'
    a = np.zeros((1, 2, 2))
    a[0, 0, 0] = 1.0
    res = solve_standard_form([np.eye(2)], [a], np.array([1.0]))
    assert res.status.value == "optimal"
    x = res.x_blocks[0]
    assert abs(np.trace(x) - 1.0) <= 1e-6
    assert abs(x[0, 0] - 1.0) <= 1e-6


def test_psd_check_rejects_asymmetric_input():
    with pytest.raises(ValueError):
        psd_check(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_problem_validation():
    spec = moment_matrix_spec(1, 1)
    with pytest.raises(ValueError):
        SdpProblem(num_vars=2, objective=np.zeros(2), blocks=[spec],
                   equalities=[(0, 1.0)])
    with pytest.raises(ValueError):
        SdpProblem(num_vars=3, objective=np.zeros(3), blocks=[],
                   equalities=[(0, 1.0)])
    with pytest.raises(ValueError):
        SdpProblem(num_vars=3, objective=np.zeros(3), blocks=[spec],
                   equalities=[])
