"""Sum-of-squares decompositions and Putinar positivity certificates.

A polynomial p of even degree 2v is a sum of squares exactly when some
positive semidefinite matrix W satisfies p(x) = z(x)' W z(x), with z
the vector of monomials of degree <= v.  Matching coefficients on both
sides turns the question into a semidefinite feasibility problem; this
module picks the minimum-trace W, whose dual is strictly feasible, so
the same interior-point engine that solves moment relaxations also
decides SOS membership.

The dual side of a moment relaxation is assembled here as well: the
largest t with p - t representable as sigma + sum_i sigma_i h_i, all
sigmas SOS and degrees capped by the relaxation order.  Its optimal
Gram matrices become an explicit certificate that can be re-verified
by polynomial arithmetic alone, with no solver in the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polynomials import (
    MonomialBasis,
    MultiIndex,
    Polynomial,
    enumerate_basis,
    parse_polynomial,
    serialize_polynomial,
)
from .relaxation import (
    PolyProblem,
    RelaxationOptions,
    Sense,
    build_relaxation,
    default_order,
    solve_relaxation,
)
from .sdp import SdpOptions, SolveStatus, _CoreStatus, psd_check, solve_standard_form

# Eigenvalues below this fraction of the leading one are treated as
# numerical zeros when squares are read off a Gram matrix.
SQUARE_CLIP = 1e-10


class NotSos(ValueError):
    """The polynomial has no SOS certificate of the requested shape."""

    def __init__(self, status: str, reason: str):
        super().__init__(f"{reason} [{status}]")
        self.status = status
        self.reason = reason


@dataclass
class SosCertificate:
    """Gram-matrix witness p = z' W z with W PSD on a monomial basis."""

    basis: MonomialBasis
    gram: np.ndarray
    squares: list[Polynomial]

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def degree(self) -> int:
        """Structural degree bound 2 * max basis degree."""
        return 2 * max((m.degree for m in self.basis.entries), default=0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "basis": [list(m.exponents) for m in self.basis.entries],
            "gram": np.asarray(self.gram, dtype=float).tolist(),
            "squares": [serialize_polynomial(q) for q in self.squares],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SosCertificate":
        n = int(obj["n"])
        entries = tuple(MultiIndex(tuple(int(e) for e in exps)) for exps in obj["basis"])
        for m in entries:
            if m.n != n:
                raise ValueError(f"basis entry {m.exponents} does not have {n} variables")
        v = max((m.degree for m in entries), default=0)
        basis = MonomialBasis(n=n, v=v, entries=entries)
        gram = np.asarray(obj["gram"], dtype=float)
        if gram.shape != (len(entries), len(entries)):
            raise ValueError(
                f"gram shape {gram.shape} does not match basis size {len(entries)}"
            )
        squares = [parse_polynomial(q) for q in obj["squares"]]
        return cls(basis=basis, gram=gram, squares=squares)


def reconstruct(cert: SosCertificate) -> Polynomial:
    """Expand z' W z back into a polynomial."""
    acc: dict[tuple[int, ...], float] = {}
    entries = cert.basis.entries
    gram = np.asarray(cert.gram, dtype=float)
    for i, bi in enumerate(entries):
        for j, bj in enumerate(entries):
            w = gram[i, j]
            if w == 0.0:
                continue
            key = (bi + bj).exponents
            acc[key] = acc.get(key, 0.0) + w
    return Polynomial(cert.n, acc)


def _squares_from_gram(
    basis: MonomialBasis, gram: np.ndarray, clip: float = SQUARE_CLIP
) -> list[Polynomial]:
    w, u = np.linalg.eigh(0.5 * (gram + gram.T))
    lead = max(float(w[-1]), 0.0)
    squares = []
    for k in range(w.size - 1, -1, -1):
        lam = float(w[k])
        if lam <= clip * max(1.0, lead):
            break
        coef = math.sqrt(lam)
        terms = {
            m.exponents: coef * float(u[i, k])
            for i, m in enumerate(basis.entries)
            if u[i, k] != 0.0
        }
        squares.append(Polynomial(basis.n, terms))
    return squares


def _gram_certificate(basis: MonomialBasis, gram: np.ndarray) -> SosCertificate:
    gram = 0.5 * (gram + gram.T)
    return SosCertificate(basis=basis, gram=gram, squares=_squares_from_gram(basis, gram))


def _one(n: int) -> SosCertificate:
    basis = enumerate_basis(n, 0)
    return SosCertificate(
        basis=basis,
        gram=np.array([[1.0]]),
        squares=[Polynomial.constant(n, 1.0)],
    )


def sos_decompose(p: Polynomial, options: SdpOptions | None = None) -> SosCertificate:
    """Find W >= 0 with p = z' W z, or raise NotSos.

    The minimum-trace Gram matrix is computed, which keeps the answer
    unique and reproducible.  Solver infeasibility is a proof that no
    PSD Gram matrix exists; any other solver failure raises RuntimeError
    because it decides nothing.
    """
    if p.degree % 2 == 1:
        raise NotSos("odd_degree", f"degree {p.degree} is odd")
    v = p.degree // 2
    basis = enumerate_basis(p.n, v)
    full = enumerate_basis(p.n, 2 * v)
    s = basis.size

    stack = np.zeros((full.size, s, s))
    for i, bi in enumerate(basis.entries):
        for j, bj in enumerate(basis.entries):
            stack[full.index(bi + bj), i, j] = 1.0
    b = np.zeros(full.size)
    for alpha, coef in p.terms.items():
        b[full.index(alpha)] = coef

    core = solve_standard_form([np.eye(s)], [stack], b, options or SdpOptions())
    if core.status is _CoreStatus.OPTIMAL:
        return _gram_certificate(basis, core.x_blocks[0])
    if core.status is _CoreStatus.PRIMAL_INFEASIBLE:
        raise NotSos(
            "infeasible", "no PSD Gram matrix matches the coefficients"
        )
    raise RuntimeError(
        f"SOS solve failed without deciding membership: {core.status.value}"
        + (f" ({core.message})" if core.message else "")
    )


@dataclass
class PutinarCertificate:
    """Weighted SOS identity sigma0 * target = sigma + sum_i sigma_i h_i.

    The target is the polynomial shown nonnegative on the constraint
    set, typically objective - bound for minimization or bound -
    objective for maximization.  The order is the total degree budget
    of the identity.
    """

    target: Polynomial
    bound: float
    order: int
    sigma0: SosCertificate
    sigma: SosCertificate
    multipliers: tuple[SosCertificate, ...]

    def to_dict(self) -> dict:
        return {
            "bound": float(self.bound),
            "order": int(self.order),
            "target": serialize_polynomial(self.target),
            "sigma0": self.sigma0.to_dict(),
            "sigma": self.sigma.to_dict(),
            "multipliers": [c.to_dict() for c in self.multipliers],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PutinarCertificate":
        return cls(
            target=parse_polynomial(obj["target"]),
            bound=float(obj["bound"]),
            order=int(obj["order"]),
            sigma0=SosCertificate.from_dict(obj["sigma0"]),
            sigma=SosCertificate.from_dict(obj["sigma"]),
            multipliers=tuple(
                SosCertificate.from_dict(c) for c in obj["multipliers"]
            ),
        )


@dataclass
class SosProgramResult:
    status: str
    bound: float
    grams: list[np.ndarray] | None
    iterations: int


_SOS_STATUS = {
    _CoreStatus.OPTIMAL: "optimal",
    # No t admits a degree-bounded representation of p - t.
    _CoreStatus.PRIMAL_INFEASIBLE: "infeasible",
    # Every t does; the constraint set is empty at this order.
    _CoreStatus.DUAL_INFEASIBLE: "unbounded",
    _CoreStatus.ITER_LIMIT: "iter_limit",
    _CoreStatus.NUMERICAL_FAILURE: "numerical_failure",
}


def _sos_program(problem: PolyProblem, d: int, options: SdpOptions | None):
    """Build and solve the SOS side of the order-d relaxation."""
    sdp_prob = build_relaxation(problem, d)
    [(pin_pos, pin_val)] = sdp_prob.equalities
    if pin_pos != 0 or pin_val != 1.0:
        raise ValueError("expected the single normalization pin y_0 = 1")

    # One Gram block per moment/localizing block.  The coefficient
    # collectors of block j are scattered from its sparse structure;
    # the constant-monomial collector goes to the objective because
    # maximizing t is minimizing the constant term of the combination.
    c_blocks, a_blocks = [], []
    nfree = sdp_prob.num_vars - 1
    for spec in sdp_prob.blocks:
        rows, cols, coefs, poss = spec.coo()
        cj = np.zeros((spec.side, spec.side))
        aj = np.zeros((nfree, spec.side, spec.side))
        at_zero = poss == 0
        np.add.at(cj, (rows[at_zero], cols[at_zero]), coefs[at_zero])
        rest = ~at_zero
        np.add.at(aj, (poss[rest] - 1, rows[rest], cols[rest]), coefs[rest])
        c_blocks.append(cj)
        a_blocks.append(aj)
    b = sdp_prob.objective[1:].copy()

    core = solve_standard_form(c_blocks, a_blocks, b, options or SdpOptions())
    return sdp_prob, c_blocks, core


def solve_sos_program(
    problem: PolyProblem, d: int | None = None, options: SdpOptions | None = None
) -> SosProgramResult:
    """Best bound certifiable by a degree-2d weighted SOS identity."""
    if d is None:
        d = default_order(problem)
    sdp_prob, c_blocks, core = _sos_program(problem, d, options)
    status = _SOS_STATUS[core.status]
    if status != "optimal":
        return SosProgramResult(
            status=status, bound=math.nan, grams=None, iterations=core.iterations
        )
    combo = sum(
        float(np.tensordot(cj, xj)) for cj, xj in zip(c_blocks, core.x_blocks)
    )
    t = float(sdp_prob.objective[0]) - combo
    bound = t if problem.sense is Sense.MIN else -t
    grams = [0.5 * (x + x.T) for x in core.x_blocks]
    return SosProgramResult(
        status=status, bound=bound, grams=grams, iterations=core.iterations
    )


def putinar_certificate(
    problem: PolyProblem, d: int | None = None, options: SdpOptions | None = None
) -> PutinarCertificate:
    """Solve the SOS side and package its Gram matrices as a certificate."""
    if d is None:
        d = default_order(problem)
    sdp_prob, c_blocks, core = _sos_program(problem, d, options)
    status = _SOS_STATUS[core.status]
    if status != "optimal":
        raise NotSos(status, f"no order-{d} certificate was found")
    combo = sum(
        float(np.tensordot(cj, xj)) for cj, xj in zip(c_blocks, core.x_blocks)
    )
    t = float(sdp_prob.objective[0]) - combo
    if problem.sense is Sense.MIN:
        bound = t
        target = problem.objective - bound
    else:
        bound = -t
        target = bound - problem.objective

    certs = [
        _gram_certificate(spec.row_basis, x)
        for spec, x in zip(sdp_prob.blocks, core.x_blocks)
    ]
    return PutinarCertificate(
        target=target,
        bound=bound,
        order=2 * d,
        sigma0=_one(problem.n),
        sigma=certs[0],
        multipliers=tuple(certs[1:]),
    )


def _linf(p: Polynomial) -> float:
    return max((abs(c) for c in p.terms.values()), default=0.0)


def verify_putinar(
    problem: PolyProblem,
    cert: PutinarCertificate,
    coeff_tol: float = 1e-6,
    psd_tol: float = 1e-8,
) -> bool:
    """Re-check a certificate by eigenvalue tests and coefficient algebra.

    Structural defects, wrong variable counts, degree budgets exceeded,
    or a multiplier count that does not match the constraints, raise
    ValueError.  A well-formed certificate that fails the PSD test or
    the polynomial identity returns False.
    """
    ell = cert.order
    if len(cert.multipliers) != len(problem.constraints):
        raise ValueError(
            f"{len(cert.multipliers)} multipliers for "
            f"{len(problem.constraints)} constraints"
        )
    parts = [cert.sigma0, cert.sigma, *cert.multipliers]
    for part in parts:
        if part.n != problem.n:
            raise ValueError(
                f"certificate block has {part.n} variables, problem has {problem.n}"
            )
    if cert.sigma.degree > ell:
        raise ValueError(f"sigma degree {cert.sigma.degree} exceeds budget {ell}")
    if cert.sigma0.degree > ell - cert.target.degree:
        raise ValueError(
            f"sigma0 degree {cert.sigma0.degree} exceeds budget "
            f"{ell - cert.target.degree}"
        )
    for h, mult in zip(problem.constraints, cert.multipliers):
        if mult.degree > ell - h.degree:
            raise ValueError(
                f"multiplier degree {mult.degree} exceeds budget {ell - h.degree} "
                f"for a degree-{h.degree} constraint"
            )

    for part in parts:
        scale = max(1.0, float(np.abs(part.gram).max()))
        ok, _ = psd_check(part.gram, tol=psd_tol * scale)
        if not ok:
            return False

    if problem.sense is Sense.MIN:
        expected = problem.objective - cert.bound
    else:
        expected = cert.bound - problem.objective
    scale = max(1.0, _linf(expected))
    if _linf(cert.target - expected) > coeff_tol * scale:
        return False

    lhs = reconstruct(cert.sigma0) * cert.target
    rhs = reconstruct(cert.sigma)
    for h, mult in zip(problem.constraints, cert.multipliers):
        rhs = rhs + reconstruct(mult) * h
    scale = max(1.0, _linf(lhs), _linf(rhs))
    return _linf(lhs - rhs) <= coeff_tol * scale


def strong_duality_check(
    problem: PolyProblem,
    d: int | None = None,
    gap_tol: float = 1e-6,
    options: RelaxationOptions | None = None,
) -> dict:
    """Solve the moment and SOS sides independently and compare.

    The two programs are duals, so matching bounds, or an infeasible
    set showing up as an unbounded certificate search and vice versa,
    is evidence both assemblies agree.
    """
    if d is None:
        d = default_order(problem)
    opts = options or RelaxationOptions()
    mom = solve_relaxation(problem, d, opts)
    sos = solve_sos_program(problem, d, opts.sdp)

    gap = math.nan
    if math.isfinite(mom.bound) and math.isfinite(sos.bound):
        gap = abs(mom.bound - sos.bound)

    mstat = mom.solver.status
    if mstat is SolveStatus.OPTIMAL and sos.status == "optimal":
        consistent = gap <= gap_tol * max(1.0, abs(mom.bound))
    elif mstat is SolveStatus.INFEASIBLE and sos.status == "unbounded":
        consistent = True
    elif mstat is SolveStatus.UNBOUNDED and sos.status == "infeasible":
        consistent = True
    else:
        consistent = False

    return {
        "order_d": d,
        "moment_bound": mom.bound,
        "sos_bound": sos.bound,
        "gap": gap,
        "moment_status": mstat.value,
        "sos_status": sos.status,
        "consistent": consistent,
    }
