"""Dense semidefinite solver for small moment and Gram problems.

The entry point solves problems of the form

    minimize    c . y
    subject to  B_j(y) >= 0        (each block positive semidefinite)
                y[k] = v_k         (pinned coordinates)

where each block B_j is a linear matrix-valued map of y given by a
MatrixSpec.  Pinned coordinates are eliminated, which turns each block
into Const_j + sum_i y_i A_ij; the reduced problem is the dual side of
a standard-form pair

    (P) min <C, X>  s.t.  <A_i, X> = b_i,  X >= 0
    (D) max b . y   s.t.  C - sum_i y_i A_i >= 0

and both sides are solved at once with an infeasible-start primal-dual
path-following method.  Directions use Nesterov-Todd symmetric scaling
with a Mehrotra predictor-corrector step; the Newton system is reduced
to a dense Schur complement and factored with Cholesky.  Steps take
0.98 of the distance to the cone boundary.  Everything is dense and
deterministic, which is the right trade for block sides in the tens.

Infeasible or unbounded problems are recognized through divergence of
the scale-invariant certificate ratios: when the dual objective (or
the negated primal objective) exceeds the corresponding residual norm
by a factor of 1e6, the normalized iterate is a numerical Farkas ray
and the problem is classified accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla

from .moments import MatrixSpec


class SolveStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITER_LIMIT = "IterLimit"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class SdpOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    step_frac: float = 0.98
    diverge_ratio: float = 1e6
    # Extra centered iterations taken after the tolerances are first
    # met.  They sharpen the iterate along the optimal face, which is
    # what point extraction from a moment matrix is sensitive to; any
    # breakdown during polish falls back to the converged iterate.
    polish_steps: int = 2
    # A run that breaks down before reaching the tolerances still
    # counts as solved when its best iterate is within this factor of
    # them; near-degenerate problems routinely stall one digit short.
    accept_factor: float = 100.0


@dataclass
class SdpProblem:
    """Linear objective over a moment-like vector with PSD block constraints."""

    num_vars: int
    objective: np.ndarray
    blocks: list[MatrixSpec]
    equalities: list[tuple[int, float]]

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValueError(
                f"objective has shape {self.objective.shape}, "
                f"expected ({self.num_vars},)"
            )
        if not self.blocks:
            raise ValueError("problem needs at least one PSD block")
        for spec in self.blocks:
            if spec.max_position() >= self.num_vars:
                raise ValueError(
                    f"block references y position {spec.max_position()}, "
                    f"but num_vars is {self.num_vars}"
                )
        if not self.equalities:
            raise ValueError("problem needs at least one pinned coordinate")
        seen = {}
        for idx, val in self.equalities:
            if not 0 <= idx < self.num_vars:
                raise ValueError(f"equality index {idx} out of range")
            if idx in seen and seen[idx] != val:
                raise ValueError(f"conflicting pins for coordinate {idx}")
            seen[idx] = float(val)


@dataclass
class IterateRecord:
    """Per-iteration log used by the duality and convergence tests."""

    k: int
    pobj: float
    dobj: float
    pinfeas: float
    dinfeas: float
    mu: float
    # Correction terms of the exact identity
    #   pobj - dobj = <X, S> - y . rp + sum_j <Rd_j, X_j>
    y_dot_rp: float
    rd_dot_x: float
    x_dot_s: float


@dataclass
class SdpSolution:
    status: SolveStatus
    y: np.ndarray
    objective_value: float
    duality_gap: float
    iterations: int
    message: str = ""
    iterate_log: list[IterateRecord] = field(default_factory=list)
    primal_blocks: list[np.ndarray] | None = None


class _CoreStatus(Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    ITER_LIMIT = "iter_limit"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class _StandardForm:
    """min sum_j <C_j, X_j> s.t. sum_j <A_ij, X_j> = b_i, X_j >= 0."""

    c_blocks: list[np.ndarray]
    a_blocks: list[np.ndarray]  # each (p, s_j, s_j)
    b: np.ndarray


@dataclass
class _CoreResult:
    status: _CoreStatus
    x_blocks: list[np.ndarray]
    y: np.ndarray
    s_blocks: list[np.ndarray]
    iterations: int
    rel_gap: float
    message: str
    log: list[IterateRecord]


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _chol(m: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with a tiny escalating diagonal shift."""
    base = np.trace(m) / max(1, m.shape[0])
    shift = 0.0
    for attempt in range(4):
        try:
            return np.linalg.cholesky(m + shift * np.eye(m.shape[0]))
        except np.linalg.LinAlgError:
            shift = max(abs(base), 1.0) * 10.0 ** (-14 + 4 * attempt)
    raise np.linalg.LinAlgError("matrix is not positive definite")

def _initial_point(form: _StandardForm):
    """Cold start on the central ray, scaled to the problem data."""
    b_scale = 1.0 + float(np.max(np.abs(form.b))) if form.b.size else 1.0
    x_blocks, s_blocks = [], []
    for c, a in zip(form.c_blocks, form.a_blocks):
        s = c.shape[0]
        a_norms = np.sqrt((a * a).sum(axis=(1, 2)))
        denom = 1.0 + (float(a_norms.max()) if a_norms.size else 0.0)
        xi = max(10.0, math.sqrt(s), s * b_scale / denom)
        eta = max(
            10.0,
            math.sqrt(s),
            (1.0 + max(float(np.linalg.norm(c)), float(a_norms.max()) if a_norms.size else 0.0))
            / math.sqrt(s),
        )
        x_blocks.append(xi * np.eye(s))
        s_blocks.append(eta * np.eye(s))
    y = np.zeros(form.b.size)
    return x_blocks, y, s_blocks


def _apply_a(form: _StandardForm, x_blocks) -> np.ndarray:
    out = np.zeros(form.b.size)
    for a, x in zip(form.a_blocks, x_blocks):
        out += np.einsum("iab,ab->i", a, x)
    return out


def _apply_at(form: _StandardForm, y: np.ndarray):
    return [np.tensordot(y, a, axes=(0, 0)) for a in form.a_blocks]


def _nt_scaling(x: np.ndarray, s: np.ndarray):
    """Factor r with r^T S r = r^-1 X r^-T = diag(lam)."""
    lx = _chol(x)
    ls = _chol(s)
    u, sig, vt = np.linalg.svd(ls.T @ lx)
    sig = np.maximum(sig, 1e-300)
    inv_sqrt = 1.0 / np.sqrt(sig)
    r = lx @ vt.T * inv_sqrt
    # r^-1 = diag(sqrt(sig)) vt lx^-1
    rinv = np.sqrt(sig)[:, None] * (vt @ sla.solve_triangular(lx, np.eye(lx.shape[0]), lower=True))
    return r, rinv, sig


def _max_step(blocks, dblocks, frac: float) -> float:
    """Largest step in [0, 1] keeping every block positive definite."""
    alpha = 1.0
    for m, dm in zip(blocks, dblocks):
        l = _chol(m)
        t = sla.solve_triangular(l, dm, lower=True)
        t = sla.solve_triangular(l, t.T, lower=True).T
        wmin = float(np.linalg.eigvalsh(_sym(t)).min())
        if wmin < 0:
            alpha = min(alpha, frac * (-1.0 / wmin))
    return alpha


def _solve_standard(form: _StandardForm, opts: SdpOptions) -> _CoreResult:
    nb = len(form.c_blocks)
    sides = [c.shape[0] for c in form.c_blocks]
    ntot = sum(sides)
    p = form.b.size
    eyes = [np.eye(s) for s in sides]

    norm_b = float(np.linalg.norm(form.b))
    norm_c = math.sqrt(sum(float(np.linalg.norm(c)) ** 2 for c in form.c_blocks))

    x_blocks, y, s_blocks = _initial_point(form)
    log: list[IterateRecord] = []

    # Late iterations can degrade once the Schur system turns singular;
    # failure paths fall back to the best iterate seen, and polish
    # iterations fall back to the first converged one.
    best = {"merit": math.inf, "x": x_blocks, "y": y, "s": s_blocks, "relgap": math.inf, "k": 0}
    snap = None
    polish_left = opts.polish_steps

    def _finish(status, k, relgap, message=""):
        if status in (_CoreStatus.ITER_LIMIT, _CoreStatus.NUMERICAL_FAILURE):
            if snap is not None:
                return _finish_snap()
            accept_tol = opts.accept_factor * max(opts.feas_tol, opts.gap_tol)
            if best["merit"] <= accept_tol:
                return _CoreResult(
                    status=_CoreStatus.OPTIMAL,
                    x_blocks=best["x"],
                    y=best["y"],
                    s_blocks=best["s"],
                    iterations=k,
                    rel_gap=best["relgap"],
                    message=f"accepted at reduced accuracy (merit {best['merit']:.2e})",
                    log=log,
                )
            return _CoreResult(
                status=status,
                x_blocks=best["x"],
                y=best["y"],
                s_blocks=best["s"],
                iterations=k,
                rel_gap=best["relgap"],
                message=message,
                log=log,
            )
        return _CoreResult(
            status=status,
            x_blocks=x_blocks,
            y=y,
            s_blocks=s_blocks,
            iterations=k,
            rel_gap=relgap,
            message=message,
            log=log,
        )

    def _finish_snap():
        return _CoreResult(
            status=_CoreStatus.OPTIMAL,
            x_blocks=snap["x"],
            y=snap["y"],
            s_blocks=snap["s"],
            iterations=snap["k"],
            rel_gap=snap["relgap"],
            message="",
            log=log,
        )

    relgap = math.inf
    for k in range(opts.max_iter):
        aty = _apply_at(form, y)
        rp = form.b - _apply_a(form, x_blocks)
        rd = [c - at - s for c, at, s in zip(form.c_blocks, aty, s_blocks)]

        pobj = sum(float(np.tensordot(c, x)) for c, x in zip(form.c_blocks, x_blocks))
        dobj = float(form.b @ y)
        xs = sum(float(np.tensordot(x, s)) for x, s in zip(x_blocks, s_blocks))
        mu = xs / ntot
        pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        dinf = math.sqrt(sum(float(np.linalg.norm(r)) ** 2 for r in rd)) / (1.0 + norm_c)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

        log.append(
            IterateRecord(
                k=k,
                pobj=pobj,
                dobj=dobj,
                pinfeas=pinf,
                dinfeas=dinf,
                mu=mu,
                y_dot_rp=float(y @ rp),
                rd_dot_x=sum(float(np.tensordot(r, x)) for r, x in zip(rd, x_blocks)),
                x_dot_s=xs,
            )
        )

        merit = max(pinf, dinf, relgap)
        if merit < best["merit"]:
            best.update(
                merit=merit,
                x=[x.copy() for x in x_blocks],
                y=y.copy(),
                s=[s.copy() for s in s_blocks],
                relgap=relgap,
                k=k,
            )

        if pinf <= opts.feas_tol and dinf <= opts.feas_tol and relgap <= opts.gap_tol:
            snap = {
                "x": [x.copy() for x in x_blocks],
                "y": y.copy(),
                "s": [s.copy() for s in s_blocks],
                "relgap": relgap,
                "k": k,
            }
            if polish_left <= 0:
                return _finish_snap()
            polish_left -= 1

        if not math.isfinite(mu) or mu <= 0.0:
            return _finish(
                _CoreStatus.NUMERICAL_FAILURE,
                k,
                relgap,
                "iterates left the cone (mu <= 0)",
            )

        # Farkas-ray divergence tests on the normalized iterates.
        aty_plus_s = math.sqrt(
            sum(float(np.linalg.norm(at + s)) ** 2 for at, s in zip(aty, s_blocks))
        )
        if dobj > 0 and dobj >= opts.diverge_ratio * max(1.0, aty_plus_s):
            return _finish(
                _CoreStatus.PRIMAL_INFEASIBLE,
                k,
                relgap,
                "dual objective diverged along an improving ray",
            )
        ax_norm = float(np.linalg.norm(form.b - rp))
        if pobj < 0 and -pobj >= opts.diverge_ratio * max(1.0, ax_norm):
            return _finish(
                _CoreStatus.DUAL_INFEASIBLE,
                k,
                relgap,
                "primal objective diverged along an improving ray",
            )

        try:
            scalings = [_nt_scaling(x, s) for x, s in zip(x_blocks, s_blocks)]
            w_blocks = [r @ r.T for r, _, _ in scalings]

            # Schur complement M[i, k] = sum_j tr(A_ij W_j A_kj W_j).
            schur = np.zeros((p, p))
            waw = []
            for a, w in zip(form.a_blocks, w_blocks):
                wa = np.einsum("ab,ibc,cd->iad", w, a, w, optimize=True)
                waw.append(wa)
                schur += np.einsum("iab,kab->ik", a, wa, optimize=True)

            schur_l = _chol(_sym(schur))

            w_rd_w = [
                np.einsum("ab,bc,cd->ad", w, r_, w)
                for w, r_ in zip(w_blocks, rd)
            ]
            a_wrdw = np.zeros(p)
            for a, m in zip(form.a_blocks, w_rd_w):
                a_wrdw += np.einsum("iab,ab->i", a, m)

            def _direction(mc_blocks):
                rhs = rp.copy() + a_wrdw
                for a, mc in zip(form.a_blocks, mc_blocks):
                    rhs -= np.einsum("iab,ab->i", a, mc)
                dy = sla.cho_solve((schur_l, True), rhs)
                ds = [r_ - np.tensordot(dy, a, axes=(0, 0)) for r_, a in zip(rd, form.a_blocks)]
                dx = [
                    _sym(mc - w @ d @ w)
                    for mc, w, d in zip(mc_blocks, w_blocks, ds)
                ]
                return dx, dy, ds

            # Predictor: target complementarity zero.
            mc_aff = [-x for x in x_blocks]
            dx_a, dy_a, ds_a = _direction(mc_aff)
            ap = _max_step(x_blocks, dx_a, opts.step_frac)
            ad = _max_step(s_blocks, ds_a, opts.step_frac)
            mu_aff = sum(
                float(np.tensordot(x + ap * dx, s + ad * ds))
                for x, dx, s, ds in zip(x_blocks, dx_a, s_blocks, ds_a)
            ) / ntot
            sigma = min(1.0, max(0.0, (max(mu_aff, 0.0) / mu) ** 3))

            # Corrector: recenter and cancel the second-order term.
            mc_blocks = []
            for (r, rinv, lam), dx, ds in zip(scalings, dx_a, ds_a):
                dxt = rinv @ dx @ rinv.T
                dst = r.T @ ds @ r
                cross = dxt @ dst
                resid = sigma * mu * np.eye(lam.size) - np.diag(lam * lam) - _sym(cross)
                denom = lam[:, None] + lam[None, :]
                mc_blocks.append(r @ (2.0 * resid / denom) @ r.T)

            dx, dy, ds = _direction(mc_blocks)
            ap = _max_step(x_blocks, dx, opts.step_frac)
            ad = _max_step(s_blocks, ds, opts.step_frac)
        except np.linalg.LinAlgError as exc:
            return _finish(
                _CoreStatus.NUMERICAL_FAILURE, k, relgap, f"linear algebra breakdown: {exc}"
            )

        if ap < 1e-10 and ad < 1e-10:
            return _finish(
                _CoreStatus.NUMERICAL_FAILURE,
                k,
                relgap,
                "step length collapsed before reaching tolerances",
            )

        x_blocks = [_sym(x + ap * d) for x, d in zip(x_blocks, dx)]
        y = y + ad * dy
        s_blocks = [_sym(s + ad * d) for s, d in zip(s_blocks, ds)]

    return _finish(_CoreStatus.ITER_LIMIT, opts.max_iter, relgap)


def _block_data(spec: MatrixSpec, pins: dict[int, float], free_index: dict[int, int], p: int):
    """Constant part and per-free-variable coefficient stack of one block."""
    rows, cols, coefs, poss = spec.coo()
    const = np.zeros((spec.side, spec.side))
    stack = np.zeros((p, spec.side, spec.side))
    for r, c, coef, pos in zip(rows, cols, coefs, poss):
        if pos in pins:
            const[r, c] += coef * pins[pos]
        else:
            stack[free_index[pos], r, c] += coef
    used = np.any(stack != 0.0, axis=(1, 2))
    return const, stack, bool(used.any())


def solve(prob: SdpProblem, options: SdpOptions | None = None) -> SdpSolution:
    """Solve the block-PSD problem; deterministic for fixed inputs."""
    opts = options or SdpOptions()
    pins = {int(i): float(v) for i, v in prob.equalities}
    free = [i for i in range(prob.num_vars) if i not in pins]
    free_index = {g: i for i, g in enumerate(free)}
    p = len(free)

    y_full = np.zeros(prob.num_vars)
    for i, v in pins.items():
        y_full[i] = v

    c_blocks, a_blocks = [], []
    for spec in prob.blocks:
        const, stack, has_free = _block_data(spec, pins, free_index, p)
        if not has_free:
            wmin = float(np.linalg.eigvalsh(_sym(const)).min())
            if wmin < -opts.feas_tol * max(1.0, float(np.abs(const).max())):
                return SdpSolution(
                    status=SolveStatus.INFEASIBLE,
                    y=y_full,
                    objective_value=math.nan,
                    duality_gap=math.nan,
                    iterations=0,
                    message=(
                        f"constant block of side {spec.side} has negative "
                        f"eigenvalue {wmin:.3e}"
                    ),
                )
            continue
        # Standard-form dual: S = C - sum y_i A_i must equal const + coeffs.
        c_blocks.append(_sym(const))
        a_blocks.append(-stack)

    if p == 0 or not c_blocks:
        obj = float(prob.objective @ y_full)
        return SdpSolution(
            status=SolveStatus.OPTIMAL,
            y=y_full,
            objective_value=obj,
            duality_gap=0.0,
            iterations=0,
            message="all coordinates pinned or constraints constant",
        )

    b = -prob.objective[free]
    form = _StandardForm(c_blocks=c_blocks, a_blocks=a_blocks, b=b)
    core = _solve_standard(form, opts)

    y_full[free] = core.y
    obj = float(prob.objective @ y_full)

    status_map = {
        _CoreStatus.OPTIMAL: SolveStatus.OPTIMAL,
        # The user problem is the standard-form dual side.
        _CoreStatus.PRIMAL_INFEASIBLE: SolveStatus.UNBOUNDED,
        _CoreStatus.DUAL_INFEASIBLE: SolveStatus.INFEASIBLE,
        _CoreStatus.ITER_LIMIT: SolveStatus.ITER_LIMIT,
        _CoreStatus.NUMERICAL_FAILURE: SolveStatus.NUMERICAL_FAILURE,
    }
    status = status_map[core.status]
    if status in (SolveStatus.INFEASIBLE, SolveStatus.UNBOUNDED):
        obj = math.nan

    return SdpSolution(
        status=status,
        y=y_full,
        objective_value=obj,
        duality_gap=core.rel_gap,
        iterations=core.iterations,
        message=core.message,
        iterate_log=core.log,
        primal_blocks=core.x_blocks if core.status == _CoreStatus.OPTIMAL else None,
    )


def solve_standard_form(c_blocks, a_blocks, b, options: SdpOptions | None = None) -> _CoreResult:
    """Direct access to the standard-form engine for Gram-matrix programs."""
    opts = options or SdpOptions()
    form = _StandardForm(
        c_blocks=[np.asarray(c, dtype=float) for c in c_blocks],
        a_blocks=[np.asarray(a, dtype=float) for a in a_blocks],
        b=np.asarray(b, dtype=float),
    )
    return _solve_standard(form, opts)


def psd_check(m: np.ndarray, tol: float = 0.0) -> tuple[bool, float]:
    """Minimum-eigenvalue PSD test; returns (is_psd, min_eigenvalue)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    if not np.allclose(m, m.T, atol=1e-10 * max(1.0, float(np.abs(m).max()))):
        raise ValueError("matrix is not symmetric")
    wmin = float(np.linalg.eigvalsh(_sym(m)).min())
    return wmin >= -tol, wmin


def residuals(prob: SdpProblem, sol: SdpSolution) -> dict:
    """Self-consistent feasibility measures of a returned solution."""
    y = np.asarray(sol.y, dtype=float)
    eq_viol = max(
        (abs(y[i] - v) for i, v in prob.equalities), default=0.0
    )
    min_eig = math.inf
    for spec in prob.blocks:
        from .moments import assemble

        wmin = float(np.linalg.eigvalsh(_sym(assemble(spec, y))).min())
        min_eig = min(min_eig, wmin)
    return {
        "primal_infeas": float(eq_viol),
        "min_block_eig": float(min_eig),
        "duality_gap": sol.duality_gap,
    }
