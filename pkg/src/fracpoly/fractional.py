"""Dinkelbach iteration for fractional polynomial programs.

The maximum of f(x) / g(x) over a set K with g > 0 on K equals the
unique lambda* at which the parametric value max_K (f - lambda * g)
crosses zero.  Each outer iteration maximizes f - lambda_k * g
globally through a moment relaxation, evaluates the ratio at the
maximizer to get lambda_{k+1}, and stops once the multiplier settles.
Convergence is superlinear, and every inner bound doubles as a
certified global bound on the parametric subproblem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polynomials import Polynomial, evaluate
from .relaxation import (
    PolyProblem,
    RelaxationOptions,
    Sense,
    default_order,
    first_order_moments,
    solve_relaxation,
)
from .sdp import SolveStatus

# An inner bound this far above the value at the recovered point marks
# the iteration as untrusted in the trace.
DIVERGE_GAP = 1e-4


class DenominatorNonPositive(ValueError):
    """g evaluated non-positive at an iterate; the ratio is undefined."""


@dataclass(frozen=True)
class FractionalProblem:
    """Maximize numerator / denominator over {x : h_i(x) >= 0}.

    The denominator must be strictly positive on the feasible set;
    this is checked only at the iterates actually visited.
    """

    n: int
    numerator: Polynomial
    denominator: Polynomial
    constraints: tuple[Polynomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for name, p in (
            ("numerator", self.numerator),
            ("denominator", self.denominator),
        ):
            if p.n != self.n:
                raise ValueError(f"{name} has n={p.n}, problem has n={self.n}")
        for h in self.constraints:
            if h.n != self.n:
                raise ValueError(f"constraint has n={h.n}, problem has n={self.n}")
        if not self.denominator:
            raise ValueError("denominator is identically zero")


@dataclass
class DinkelbachRecord:
    """One outer iteration: multiplier, inner solve, and ratio update."""

    k: int
    lam: float
    x: np.ndarray
    F: float
    ratio: float
    bound: float
    rank_ratio: float
    certified: bool
    inner_iterations: int
    gap_flag: bool


@dataclass
class FractionalResult:
    x: np.ndarray | None
    lam: float
    status: str
    certified: bool
    order_d: int = 0
    trace: list[DinkelbachRecord] = field(default_factory=list)


def solve_fractional(
    problem: FractionalProblem,
    d: int | None = None,
    eps: float = 1e-6,
    max_outer: int = 50,
    lambda0: float = 0.0,
    options: RelaxationOptions | None = None,
) -> FractionalResult:
    """Run the outer iteration until |lambda_k - lambda_{k-1}| < eps.

    The relaxation order d is fixed across iterations and defaults to
    the order covering every polynomial in the problem.  Starting
    multipliers other than zero restart the iteration, which converges
    from any lambda0 below the optimum; at the optimum itself one
    inner solve confirms the fixed point.
    """
    if d is None:
        d = default_order(
            PolyProblem(
                n=problem.n,
                sense=Sense.MAX,
                objective=problem.numerator - problem.denominator,
                constraints=problem.constraints,
            )
        )
    lam_prev = lambda0 - 1.0
    lam = lambda0
    trace: list[DinkelbachRecord] = []
    x: np.ndarray | None = None
    status = "iteration_limit"

    for k in range(max_outer):
        if abs(lam - lam_prev) < eps:
            status = "converged"
            break

        inner = PolyProblem(
            n=problem.n,
            sense=Sense.MAX,
            objective=problem.numerator - lam * problem.denominator,
            constraints=problem.constraints,
        )
        res = solve_relaxation(inner, d, options)
        if res.solver.status is not SolveStatus.OPTIMAL:
            status = "inner_" + res.solver.status.value.lower()
            break

        xk = res.extracted
        if xk is None:
            xk = first_order_moments(inner, res.y)
        fval = evaluate(problem.numerator, xk)
        gval = evaluate(problem.denominator, xk)
        if gval <= 0.0:
            raise DenominatorNonPositive(
                f"denominator is {gval:.6g} at iterate {k}; "
                "the problem needs g > 0 on the feasible set"
            )
        F = fval - lam * gval
        gap_flag = not (
            abs(res.bound - F) <= DIVERGE_GAP * max(1.0, abs(res.bound))
        )
        trace.append(
            DinkelbachRecord(
                k=k,
                lam=lam,
                x=np.asarray(xk, dtype=float).copy(),
                F=F,
                ratio=fval / gval,
                bound=res.bound,
                rank_ratio=res.rank_ratio,
                certified=res.certified,
                inner_iterations=res.solver.iterations,
                gap_flag=gap_flag,
            )
        )
        x = trace[-1].x
        lam_prev = lam
        lam = fval / gval

    certified = (
        status == "converged"
        and bool(trace)
        and all(rec.certified for rec in trace)
    )
    return FractionalResult(
        x=x, lam=lam, status=status, certified=certified, order_d=d, trace=trace
    )


def transform_positive_denominator(problem: FractionalProblem) -> FractionalProblem:
    """Rewrite f/g as (f*g)/g^2, equal wherever g is nonzero.

    Useful when g changes sign away from the feasible set, since the
    squared denominator is positive at every point with g != 0.
    """
    return FractionalProblem(
        n=problem.n,
        numerator=problem.numerator * problem.denominator,
        denominator=problem.denominator * problem.denominator,
        constraints=problem.constraints,
    )


def relative_error(value: float, reference: float) -> float:
    """|value - reference| / max(1, |reference|)."""
    return abs(value - reference) / max(1.0, abs(reference))
