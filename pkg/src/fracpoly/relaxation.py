"""Moment relaxations of polynomial optimization problems.

A problem min/max p(x) over the set {x : h_i(x) >= 0} is relaxed at
order d to a semidefinite program over pseudo-moments y of degree
<= 2d: minimize the objective's pairing with y subject to the moment
matrix and one localizing matrix per constraint being positive
semidefinite, with the zero-degree moment pinned to one.  The optimal
value bounds the true optimum from below (minimization) or above
(maximization); when the optimal moment matrix is numerically rank
one, the optimizer itself is read off its leading eigenvector and
certified by direct substitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .moments import (
    MomentIndexMap,
    assemble,
    localizing_matrix_spec,
    moment_matrix_spec,
)
from .polynomials import Polynomial, basis_size, evaluate, to_coeff_vector
from .sdp import SdpOptions, SdpProblem, SdpSolution, SolveStatus, solve as solve_sdp

DEFAULT_RANK_TOL = 1e-6

# Tolerances used when certifying an extracted point.
CERT_FEAS_TOL = 1e-6
CERT_VALUE_TOL = 1e-5


class Sense(Enum):
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class PolyProblem:
    """Polynomial objective and inequality constraints h_i(x) >= 0."""

    n: int
    sense: Sense
    objective: Polynomial
    constraints: tuple[Polynomial, ...] = ()

    def __post_init__(self):
        if self.objective.n != self.n:
            raise ValueError(
                f"objective has n={self.objective.n}, problem has n={self.n}"
            )
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for h in self.constraints:
            if h.n != self.n:
                raise ValueError(f"constraint has n={h.n}, problem has n={self.n}")


@dataclass
class RelaxationResult:
    order_d: int
    bound: float
    y: np.ndarray
    rank_ratio: float
    extracted: np.ndarray | None
    certified: bool
    solver: SdpSolution


def default_order(problem: PolyProblem) -> int:
    """ceil(v / 2) + 1 where v is the largest degree in the problem."""
    v = max(
        [problem.objective.degree] + [h.degree for h in problem.constraints]
    )
    return max(1, (v + 1) // 2 + 1)


def build_relaxation(problem: PolyProblem, d: int) -> SdpProblem:
    """Assemble the order-d moment relaxation as a block SDP.

    The moment vector is indexed by all multi-indices of degree <= 2d,
    so 2d must cover every polynomial degree in the problem.
    """
    degrees = [problem.objective.degree] + [h.degree for h in problem.constraints]
    if 2 * d < max(degrees):
        raise ValueError(
            f"order d={d} cannot represent degree {max(degrees)}; need 2d >= degree"
        )
    ymap = MomentIndexMap.build(problem.n, d)
    c = to_coeff_vector(problem.objective, ymap.y_basis)
    if problem.sense is Sense.MAX:
        c = -c
    blocks = [moment_matrix_spec(problem.n, d)]
    for h in problem.constraints:
        blocks.append(localizing_matrix_spec(h, problem.n, d))
    return SdpProblem(
        num_vars=ymap.size,
        objective=c,
        blocks=blocks,
        equalities=[(ymap.position((0,) * problem.n), 1.0)],
    )


def _moment_rank_data(problem: PolyProblem, d: int, y: np.ndarray):
    spec = moment_matrix_spec(problem.n, d)
    mm = assemble(spec, y)
    w, u = np.linalg.eigh(mm)
    lead = float(w[-1])
    second = float(w[-2]) if w.size > 1 else 0.0
    ratio = second / lead if lead > 0 else math.inf
    return mm, w, u, ratio


def extract_minimizer(
    problem: PolyProblem,
    d: int,
    y: np.ndarray,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray | None:
    """Read the optimizer off a numerically rank-one moment matrix.

    Factor the moment matrix as v v^T from its leading eigenpair,
    normalize v to unit constant entry, and return the coordinates of
    the degree-one block.  Returns None when the second-to-first
    eigenvalue ratio exceeds rank_tol.
    """
    _, w, u, ratio = _moment_rank_data(problem, d, np.asarray(y, dtype=float))
    if not (ratio <= rank_tol):
        return None
    v = math.sqrt(max(float(w[-1]), 0.0)) * u[:, -1]
    if abs(v[0]) < 1e-8:
        return None
    v = v / v[0]
    return v[1 : problem.n + 1].copy()


def first_order_moments(problem: PolyProblem, y: np.ndarray) -> np.ndarray:
    """Degree-one moments, the fallback point when extraction fails."""
    return np.asarray(y, dtype=float)[1 : problem.n + 1].copy()


def certify(
    problem: PolyProblem,
    x: np.ndarray,
    bound: float,
    tol: float = CERT_VALUE_TOL,
) -> bool:
    """Check feasibility and bound attainment of a candidate point."""
    return _certify(problem, x, bound, feas_tol=tol, value_tol=tol)


def _certify(problem, x, bound, feas_tol, value_tol) -> bool:
    for h in problem.constraints:
        if evaluate(h, x) < -feas_tol:
            return False
    return abs(evaluate(problem.objective, x) - bound) <= value_tol * max(1.0, abs(bound))


@dataclass
class RelaxationOptions:
    rank_tol: float = DEFAULT_RANK_TOL
    # The point tolerance of the extraction step wants a gap about two
    # orders tighter than the solver default.
    sdp: SdpOptions = field(
        default_factory=lambda: SdpOptions(feas_tol=1e-9, gap_tol=1e-10, max_iter=200)
    )


def solve_relaxation(
    problem: PolyProblem,
    d: int | None = None,
    options: RelaxationOptions | None = None,
) -> RelaxationResult:
    """Solve the order-d relaxation and attempt point extraction."""
    opts = options or RelaxationOptions()
    if d is None:
        d = default_order(problem)
    sdp_prob = build_relaxation(problem, d)
    sol = solve_sdp(sdp_prob, opts.sdp)

    sign = -1.0 if problem.sense is Sense.MAX else 1.0
    bound = sign * sol.objective_value if math.isfinite(sol.objective_value) else math.nan

    if sol.status not in (SolveStatus.OPTIMAL,):
        return RelaxationResult(
            order_d=d,
            bound=bound,
            y=sol.y,
            rank_ratio=math.inf,
            extracted=None,
            certified=False,
            solver=sol,
        )

    _, _, _, ratio = _moment_rank_data(problem, d, sol.y)
    extracted = extract_minimizer(problem, d, sol.y, opts.rank_tol)
    certified = False
    if extracted is not None:
        certified = _certify(
            problem, extracted, bound, feas_tol=CERT_FEAS_TOL, value_tol=CERT_VALUE_TOL
        )
    return RelaxationResult(
        order_d=d,
        bound=bound,
        y=sol.y,
        rank_ratio=ratio,
        extracted=extracted,
        certified=certified,
        solver=sol,
    )


def estimate_cost(n: int, m: int, d: int) -> int:
    """Interior-point flop estimate n^2 m s^3 + n m s^4, s = C(n+d, d).

    Exact integer arithmetic; a documentation aid, not a performance
    model of this implementation.
    """
    s = basis_size(n, d)
    return n * n * m * s**3 + n * m * s**4


def complexity_report(n: int, m: int, d: int) -> dict:
    """Cost estimate next to the commonly misquoted smaller basis.

    Literature discussions of the n=2, d=6 case sometimes quote a
    basis of size 15, which is the degree-4 count C(6, 4); the correct
    degree-6 count is C(8, 6) = 28.  The report carries both so the
    discrepancy stays visible.
    """
    s = basis_size(n, d)
    report = {
        "n": n,
        "m": m,
        "d": d,
        "basis_size": s,
        "flop_estimate": estimate_cost(n, m, d),
    }
    if n == 2 and d == 6:
        s_small = basis_size(2, 4)
        report["misquoted_basis_size"] = s_small
        report["misquoted_flop_estimate"] = (
            n * n * m * s_small**3 + n * m * s_small**4
        )
        report["note"] = (
            f"a degree-6 bivariate basis has {s} monomials; the often quoted "
            f"{s_small} is the degree-4 count"
        )
    return report
