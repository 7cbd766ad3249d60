"""Energy-efficiency dimensioning of a cellular deployment.

The decision variables are the number of users per cell x1 = K and the
number of base-station antennas x2 = M.  Energy efficiency is a ratio
of two trivariate-free polynomials in (K, M) whose coefficients come
from a hardware and channel model supplied by configuration; the SINR
and coherence-budget constraints reduce to two polynomial inequalities
h1 >= 0, h2 >= 0 with closed-form coefficients in the SINR target
gamma, coherence block length tau, pathloss exponent alpha, and
average SNR.  The continuous problem is handed to the fractional
solver on a rescaled unit box and the result is rounded back to an
integer deployment, optionally validated against an exhaustive search
over the integer grid.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .fractional import FractionalProblem, FractionalResult, solve_fractional
from .polynomials import Polynomial, evaluate, evaluate_many, scale_variables
from .relaxation import RelaxationOptions

# Monomial supports of the energy-efficiency ratio; configs may not
# stray outside these and must list every key explicitly.
NUMERATOR_SUPPORT = ((1, 0), (2, 0), (1, 1), (2, 1), (3, 0))
DENOMINATOR_SUPPORT = (
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (2, 1),
    (1, 2),
    (3, 0),
)

DEFAULT_M_MAX = 1024

_KEY_RE = re.compile(r"^\((\d+)\s*,\s*(\d+)\)$")


@dataclass(frozen=True)
class EEParams:
    """Physical parameters behind the constraint polynomials.

    snr is stored as given; snr_unit must say whether that is linear
    or dB, and conversion happens in snr_linear.  Extra metadata such
    as bandwidth or station density is carried for reporting only.
    """

    gamma: float
    tau: float
    alpha: float
    snr: float
    snr_unit: str = "linear"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.snr_unit not in ("linear", "dB"):
            raise ValueError(f"snr_unit must be 'linear' or 'dB', got {self.snr_unit!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.tau >= 1:
            raise ValueError(f"tau must be at least 1, got {self.tau}")
        if not self.alpha > 2:
            raise ValueError(
                f"alpha must exceed 2 (the coefficients divide by alpha - 2), "
                f"got {self.alpha}"
            )
        if not self.snr_linear > 0:
            raise ValueError(f"snr must be positive, got {self.snr}")

    @property
    def snr_linear(self) -> float:
        if self.snr_unit == "dB":
            return 10.0 ** (self.snr / 10.0)
        return float(self.snr)


def constraint_coeffs(params: EEParams) -> tuple[Polynomial, Polynomial]:
    """Constraint polynomials h1, h2 from their closed-form coefficients.

    h1 >= 0 caps the pilot overhead within the coherence budget and
    h2 >= 0 keeps the SINR target reachable; both are polynomial
    rewritings of a two-sided condition on (K, M).
    """
    g, t, a = params.gamma, params.tau, params.alpha
    snr = params.snr_linear
    q2 = 2.0 / (a - 2.0)
    q1 = 1.0 / (a - 1.0)
    # Shared subexpressions of the closed forms.
    ring = 4.0 / (a - 2.0) ** 2 + q1 + q2
    load = 1.0 + q2

    h1 = Polynomial(
        2,
        {
            (0, 0): -g * t * load,
            (1, 0): -(g / snr) * q2 - g * t * load * (1.0 + 1.0 / snr),
            (0, 1): t,
            (1, 1): -g * q1,
            (2, 0): -g * ring,
        },
    )
    h2 = Polynomial(
        2,
        {
            (0, 0): (g / snr) * (q2 + 1.0 + 1.0 / snr),
            (1, 0): g * ring + g * load * (1.0 + 1.0 / snr),
            (0, 1): g * (q1 - 1.0),
        },
    )
    return h1, h2


@dataclass(frozen=True)
class EEProblem:
    """Integer dimensioning problem max EE(K, M) on a constrained grid."""

    params: EEParams
    numerator: Polynomial
    denominator: Polynomial
    constraints: tuple[Polynomial, Polynomial]
    k_max: int
    m_max: int

    def feasible(self, k: float, m: float) -> bool:
        x = (float(k), float(m))
        return all(evaluate(h, x) >= 0.0 for h in self.constraints)

    def ee(self, k: float, m: float) -> float:
        x = (float(k), float(m))
        den = evaluate(self.denominator, x)
        if den <= 0.0:
            return math.nan
        return evaluate(self.numerator, x) / den


def _parse_support_block(block, support, label: str) -> dict[tuple[int, int], float]:
    if not isinstance(block, dict):
        raise ValueError(f"objective.{label} must be an object of coefficient entries")
    allowed = {tuple(s) for s in support}
    coeffs: dict[tuple[int, int], float] = {}
    for key, val in block.items():
        m = _KEY_RE.match(key.strip())
        if not m:
            raise ValueError(
                f"objective.{label} key {key!r} is not an '(i,j)' exponent pair"
            )
        exp = (int(m.group(1)), int(m.group(2)))
        if exp not in allowed:
            raise ValueError(
                f"objective.{label} key {key!r} is outside the documented support "
                f"{sorted(allowed)}"
            )
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ValueError(f"objective.{label}[{key!r}] must be a number")
        coeffs[exp] = float(val)
    missing = allowed - set(coeffs)
    if missing:
        raise ValueError(
            f"objective.{label} is missing coefficients for {sorted(missing)}; "
            "every supported monomial must be listed, zeros included"
        )
    return coeffs


def load_objective(config: dict) -> EEProblem:
    """Build a validated EEProblem from a configuration mapping.

    The objective coefficients must cover exactly the documented
    monomial supports.  The denominator is required to be positive at
    every feasible integer grid point, since the fractional solver
    divides by it.
    """
    if "params" not in config:
        raise ValueError("config is missing the 'params' section")
    psec = dict(config["params"])
    try:
        params = EEParams(
            gamma=float(psec.pop("gamma")),
            tau=float(psec.pop("tau")),
            alpha=float(psec.pop("alpha")),
            snr=float(psec.pop("snr")),
            snr_unit=psec.pop("snr_unit"),
            metadata=psec,
        )
    except KeyError as exc:
        raise ValueError(f"params section is missing {exc.args[0]!r}") from None

    if "objective" not in config or not isinstance(config["objective"], dict):
        raise ValueError("config is missing the 'objective' section")
    osec = config["objective"]
    if "f" not in osec or "g" not in osec:
        raise ValueError("objective section needs both 'f' and 'g' blocks")
    f_coeffs = _parse_support_block(osec["f"], NUMERATOR_SUPPORT, "f")
    g_coeffs = _parse_support_block(osec["g"], DENOMINATOR_SUPPORT, "g")
    numerator = Polynomial(2, f_coeffs)
    denominator = Polynomial(2, g_coeffs)
    if not denominator:
        raise ValueError("denominator is identically zero")

    grid = config.get("grid", {})
    k_max = int(grid.get("K_max", int(params.tau)))
    m_max = int(grid.get("M_max", DEFAULT_M_MAX))
    if k_max < 1 or m_max < 1:
        raise ValueError(f"grid bounds must be positive, got ({k_max}, {m_max})")

    h1, h2 = constraint_coeffs(params)
    prob = EEProblem(
        params=params,
        numerator=numerator,
        denominator=denominator,
        constraints=(h1, h2),
        k_max=k_max,
        m_max=m_max,
    )

    pts, feas = _grid_points(prob)
    if feas.any():
        den = evaluate_many(denominator, pts[feas])
        if den.min() <= 0.0:
            bad = pts[feas][int(den.argmin())]
            raise ValueError(
                f"denominator is nonpositive at the feasible grid point "
                f"(K={int(bad[0])}, M={int(bad[1])})"
            )
    return prob


def load_config(path) -> EEProblem:
    """Read a JSON configuration file and validate it."""
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    return load_objective(config)


def _grid_points(
    prob: EEProblem,
    k_range: tuple[int, int] | None = None,
    m_range: tuple[int, int] | None = None,
):
    """All integer grid points in lexicographic order plus feasibility."""
    k_lo, k_hi = k_range or (1, prob.k_max)
    m_lo, m_hi = m_range or (1, prob.m_max)
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    ms = np.arange(m_lo, m_hi + 1, dtype=float)
    kk, mm = np.meshgrid(ks, ms, indexing="ij")
    pts = np.column_stack([kk.ravel(), mm.ravel()])
    feas = np.ones(len(pts), dtype=bool)
    for h in prob.constraints:
        feas &= evaluate_many(h, pts) >= 0.0
    return pts, feas


def exhaustive_search(
    prob: EEProblem,
    k_range: tuple[int, int] | None = None,
    m_range: tuple[int, int] | None = None,
) -> tuple[int, int, float]:
    """Feasible integer maximizer of the ratio; ties go to smaller (K, M)."""
    pts, feas = _grid_points(prob, k_range, m_range)
    if not feas.any():
        raise ValueError("no feasible point on the integer grid")
    den = evaluate_many(prob.denominator, pts[feas])
    if den.min() <= 0.0:
        bad = pts[feas][int(den.argmin())]
        raise ValueError(
            f"denominator is nonpositive at the feasible grid point "
            f"(K={int(bad[0])}, M={int(bad[1])})"
        )
    ee = np.full(len(pts), -np.inf)
    ee[feas] = evaluate_many(prob.numerator, pts[feas]) / den
    # Lexicographic point order makes argmax the smallest (K, M) tie-break.
    best = int(np.argmax(ee))
    return int(pts[best, 0]), int(pts[best, 1]), float(ee[best])


def grid_values(prob: EEProblem) -> list[tuple[int, int, float, bool]]:
    """Per-point (K, M, EE, feasible) rows for surface reports.

    EE is reported wherever the denominator is positive, feasible or
    not, so the surface shows the full landscape.
    """
    pts, feas = _grid_points(prob)
    num = evaluate_many(prob.numerator, pts)
    den = evaluate_many(prob.denominator, pts)
    rows = []
    for i in range(len(pts)):
        ee = num[i] / den[i] if den[i] > 0.0 else math.nan
        rows.append((int(pts[i, 0]), int(pts[i, 1]), float(ee), bool(feas[i])))
    return rows


@dataclass
class EEResult:
    continuous: np.ndarray
    continuous_ee: float
    rounded: tuple[int, int]
    rounded_ee: float
    rounded_feasible: bool
    status: str
    certified: bool
    frac: FractionalResult
    oracle: tuple[int, int, float] | None = None
    epsilon: float | None = None
    epsilon_trace: list[tuple[int, float]] | None = None


def _scaled_fractional(prob: EEProblem) -> FractionalProblem:
    """Rescale (K, M) to the unit box and normalize magnitudes.

    Moments of the raw variables reach k_max^6 * m_max^6 at the
    default relaxation order, far outside a workable floating-point
    range, so the solver always runs on x = (K/k_max, M/m_max).  One
    common factor on numerator and denominator keeps the ratio
    unchanged; each constraint is scaled independently.  The box
    constraints x_i (1 - x_i) >= 0 are redundant on the grid but keep
    the relaxation bounded.
    """
    scales = (float(prob.k_max), float(prob.m_max))
    num = scale_variables(prob.numerator, scales)
    den = scale_variables(prob.denominator, scales)
    common = max(abs(c) for c in den.terms.values())
    num = num * (1.0 / common)
    den = den * (1.0 / common)

    constraints = []
    for h in prob.constraints:
        hs = scale_variables(h, scales)
        hmax = max(abs(c) for c in hs.terms.values())
        constraints.append(hs * (1.0 / hmax))
    for i in range(2):
        constraints.append(
            Polynomial(2, {tuple(1 if j == i else 0 for j in range(2)): 1.0})
            - Polynomial(2, {tuple(2 if j == i else 0 for j in range(2)): 1.0})
        )
    return FractionalProblem(
        n=2, numerator=num, denominator=den, constraints=tuple(constraints)
    )


def _best_rounding(prob: EEProblem, point: np.ndarray) -> tuple[tuple[int, int], float, bool]:
    """Nearest integer point, falling back to the four axis neighbors.

    Returns the feasible candidate with the best ratio; when all five
    are infeasible the plain rounding is reported as such.
    """
    rk = int(np.clip(round(float(point[0])), 1, prob.k_max))
    rm = int(np.clip(round(float(point[1])), 1, prob.m_max))
    candidates = [(rk, rm), (rk - 1, rm), (rk + 1, rm), (rk, rm - 1), (rk, rm + 1)]
    seen = []
    for k, m in candidates:
        if 1 <= k <= prob.k_max and 1 <= m <= prob.m_max and (k, m) not in seen:
            seen.append((k, m))
    best = None
    for k, m in seen:
        if not prob.feasible(k, m):
            continue
        ee = prob.ee(k, m)
        if math.isnan(ee):
            continue
        if best is None or ee > best[1] or (ee == best[1] and (k, m) < best[0]):
            best = ((k, m), ee)
    if best is not None:
        return best[0], best[1], True
    return (rk, rm), prob.ee(rk, rm), False


def solve_ee(
    prob: EEProblem,
    d: int = 6,
    eps: float = 1e-6,
    max_outer: int = 50,
    oracle: bool = False,
    options: RelaxationOptions | None = None,
) -> EEResult:
    """Continuous fractional solve, integer rounding, optional grid check.

    epsilon = 1 - EE(rounded) / EE(exhaustive) when the oracle runs;
    the per-iteration trace applies the same rounding to each iterate
    so the error curve is comparable.
    """
    frac = _scaled_fractional(prob)
    res = solve_fractional(frac, d=d, eps=eps, max_outer=max_outer, options=options)

    scales = np.array([float(prob.k_max), float(prob.m_max)])
    if res.x is None:
        raise RuntimeError(f"fractional solve produced no iterate: {res.status}")
    continuous = res.x * scales
    continuous_ee = prob.ee(continuous[0], continuous[1])
    rounded, rounded_ee, rounded_feasible = _best_rounding(prob, continuous)

    oracle_out = None
    epsilon = None
    eps_trace = None
    if oracle:
        oracle_out = exhaustive_search(prob)
        ee_star = oracle_out[2]
        if ee_star > 0:
            epsilon = 1.0 - rounded_ee / ee_star
            eps_trace = []
            for rec in res.trace:
                pt = rec.x * scales
                _, ee_k, feas_k = _best_rounding(prob, pt)
                # An iterate whose rounding has no feasible candidate has
                # no meaningful deployment error yet.
                err = 1.0 - ee_k / ee_star if feas_k else math.nan
                eps_trace.append((rec.k, err))
    return EEResult(
        continuous=continuous,
        continuous_ee=continuous_ee,
        rounded=rounded,
        rounded_ee=rounded_ee,
        rounded_feasible=rounded_feasible,
        status=res.status,
        certified=res.certified,
        frac=res,
        oracle=oracle_out,
        epsilon=epsilon,
        epsilon_trace=eps_trace,
    )
