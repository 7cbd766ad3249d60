"""Command line front end.

Subcommands:

* ``solve-poly FILE``: optimize a polynomial over a basic closed
  semialgebraic set through the moment relaxation.
* ``solve-frac FILE``: optimize a ratio of polynomials through the
  outer parametric iteration.
* ``solve-ee FILE``: run the bundled energy-efficiency application
  from a coefficient config.
* ``certify-sos FILE``: attempt a sum-of-squares decomposition.
* ``example1``: solve the built-in bivariate quadratic demo and print
  its certificate, plus a correction for a commonly misquoted version
  of the same problem.

Exit status is 0 when the run produced a certified global answer, 2
when it finished without a certificate (including a rejected
decomposition), and 1 on any error, including infeasible problems.
Reports and CSVs are written only when the matching flag names a path;
every CSV gets a companion PNG rendered next to it with the same stem.
Identical inputs, options, and seed produce byte-identical outputs.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .energy import load_objective, solve_ee, grid_values
from .fractional import (
    DenominatorNonPositive,
    FractionalProblem,
    solve_fractional,
)
from .polynomials import (
    Polynomial,
    SchemaError,
    enumerate_basis,
    evaluate,
    evaluate_many,
    parse_polynomial,
    poly_scale,
)
from .relaxation import (
    PolyProblem,
    RelaxationOptions,
    Sense,
    default_order,
    solve_relaxation,
)
from .reports import (
    emit_error_csv,
    emit_grid_csv,
    emit_trace_csv,
    report_metadata,
    write_report,
)
from .sdp import SdpOptions, SolveStatus
from .sos import NotSos, reconstruct, sos_decompose

# The sampling oracle draws this many points from a fixed box; it is a
# sanity check, not a solver, and stays out of the exit-code contract.
ORACLE_SAMPLES = 200_000
ORACLE_RADIUS = 10.0

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["n", "sense", "objective"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "sense": {"enum": ["min", "max"]},
        "objective": {"type": "object"},
        "constraints": {"type": "array", "items": {"type": "object"}},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "order": {"type": "integer", "minimum": 1},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "feas_tol": {"type": "number", "exclusiveMinimum": 0},
                "gap_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_outer": {"type": "integer", "minimum": 1},
            },
        },
    },
}

SOS_FILE_SCHEMA = {
    "type": "object",
    "required": ["n", "terms"],
}

EE_CONFIG_SCHEMA = {
    "type": "object",
    "required": ["params", "objective"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "params": {"type": "object"},
        "objective": {
            "type": "object",
            "required": ["f", "g"],
            "additionalProperties": False,
            "properties": {"f": {"type": "object"}, "g": {"type": "object"}},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "K_max": {"type": "integer", "minimum": 1},
                "M_max": {"type": "integer", "minimum": 1},
            },
        },
    },
}


class CliError(Exception):
    """User-facing failure; the message goes to stderr and exit is 1."""


def _load_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def _json_path(error):
    out = "$"
    for part in error.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def _check_schema(doc, schema, source):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(
        validator.iter_errors(doc),
        key=lambda e: (len(list(e.absolute_path)), e.message),
    )
    if errors:
        err = errors[0]
        raise CliError(f"{source}: {_json_path(err)}: {err.message}")


def _parse_poly_slot(obj, n, where):
    try:
        p = parse_polynomial(obj)
    except SchemaError as exc:
        raise CliError(f"{where}: {exc}")
    if p.n != n:
        raise CliError(f"{where}: polynomial has n={p.n}, problem file has n={n}")
    return p


def _load_problem(path):
    doc = _load_json(path)
    _check_schema(doc, PROBLEM_SCHEMA, path)
    n = doc["n"]
    sense = doc["sense"]
    constraints = tuple(
        _parse_poly_slot(c, n, f"{path}: constraints[{i}]")
        for i, c in enumerate(doc.get("constraints", []))
    )
    opts = doc.get("options", {})
    obj = doc["objective"]
    if "numerator" in obj or "denominator" in obj:
        if "numerator" not in obj or "denominator" not in obj:
            raise CliError(
                f"{path}: a fractional objective needs both numerator and denominator"
            )
        num = _parse_poly_slot(obj["numerator"], n, f"{path}: objective.numerator")
        den = _parse_poly_slot(obj["denominator"], n, f"{path}: objective.denominator")
        return "frac", n, sense, (num, den), constraints, opts
    objective = _parse_poly_slot(obj, n, f"{path}: objective")
    return "poly", n, sense, objective, constraints, opts


def _require_positive(name, value):
    if value is not None and not value > 0:
        raise CliError(f"{name} must be positive, got {value}")


def _pick(flag_value, file_options, key, fallback=None):
    if flag_value is not None:
        return flag_value
    if key in file_options:
        return file_options[key]
    return fallback


def _relaxation_options(args, file_options):
    opts = RelaxationOptions()
    feas = _pick(args.feas_tol, file_options, "feas_tol")
    gap = _pick(args.gap_tol, file_options, "gap_tol")
    _require_positive("--feas-tol", feas)
    _require_positive("--gap-tol", gap)
    if feas is not None:
        opts.sdp.feas_tol = float(feas)
    if gap is not None:
        opts.sdp.gap_tol = float(gap)
    return opts


def _fmt(x):
    return repr(float(x))


def _fmt_point(x):
    return "(" + ", ".join(_fmt(v) for v in x) + ")"


def _mono_str(exponents):
    parts = []
    for i, e in enumerate(exponents):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts) if parts else "1"


def _sampling_oracle(n, sense, constraints, seed, objective=None, ratio=None):
    """Best objective value over seeded uniform samples of a fixed box.

    Returns (point, value) over the feasible samples, or None when no
    sample lands in the feasible set. ratio, when given, is a
    (numerator, denominator) pair evaluated only where the denominator
    is positive.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-ORACLE_RADIUS, ORACLE_RADIUS, size=(ORACLE_SAMPLES, n))
    mask = np.ones(len(pts), dtype=bool)
    for h in constraints:
        mask &= evaluate_many(h, pts) >= 0.0
    if ratio is not None:
        den = evaluate_many(ratio[1], pts)
        mask &= den > 0.0
    if not mask.any():
        return None
    pts = pts[mask]
    if ratio is not None:
        values = evaluate_many(ratio[0], pts) / evaluate_many(ratio[1], pts)
    else:
        values = evaluate_many(objective, pts)
    idx = int(np.argmin(values)) if sense is Sense.MIN else int(np.argmax(values))
    return pts[idx], float(values[idx])


def _oracle_consistent(sense, bound, oracle_value):
    # The relaxation bound must sit on the optimistic side of any
    # sampled feasible value.
    tol = 1e-6 * max(1.0, abs(oracle_value))
    if sense is Sense.MIN:
        return bound <= oracle_value + tol
    return bound >= oracle_value - tol


def _figure_path(csv_path):
    return Path(csv_path).with_suffix(".png")


def _trace_summary(trace):
    if not trace:
        return {"rows": 0}
    last = trace[-1]
    return {
        "rows": len(trace),
        "final_F": last.F,
        "final_ratio": last.ratio,
        "all_inner_certified": all(rec.certified for rec in trace),
    }


def cmd_solve_poly(args):
    kind, n, sense_str, objective, constraints, fopts = _load_problem(args.file)
    if kind != "poly":
        raise CliError(f"{args.file}: objective is a ratio; use solve-frac")
    sense = Sense(sense_str)
    problem = PolyProblem(n=n, sense=sense, objective=objective, constraints=constraints)
    order = _pick(args.order, fopts, "order")
    if order is None:
        order = default_order(problem)
    if order < 1:
        raise CliError(f"--order must be at least 1, got {order}")
    opts = _relaxation_options(args, fopts)

    res = solve_relaxation(problem, order, opts)
    status = res.solver.status
    if status is SolveStatus.INFEASIBLE:
        raise CliError(f"constraint set reported infeasible at order {order}")
    if status is SolveStatus.UNBOUNDED:
        raise CliError(
            f"relaxation unbounded at order {order}; raise --order or add constraints"
        )
    if status is not SolveStatus.OPTIMAL:
        raise CliError(f"solver failed: {status.value}: {res.solver.message}")

    value = None
    if res.extracted is not None:
        value = evaluate(objective, res.extracted)

    oracle_out = None
    if args.oracle:
        oracle_out = _sampling_oracle(
            n, sense, constraints, args.seed, objective=objective
        )

    print(f"order: {order}")
    print(f"bound: {_fmt(res.bound)}")
    if res.extracted is not None:
        print(f"point: {_fmt_point(res.extracted)}")
        print(f"value: {_fmt(value)}")
    else:
        print(f"point: not extracted (rank ratio {res.rank_ratio:.3e})")
    print(f"certified: {'yes' if res.certified else 'no'}")
    if args.oracle:
        if oracle_out is None:
            print("oracle: no feasible sample in the search box")
        else:
            ox, ov = oracle_out
            ok = _oracle_consistent(sense, res.bound, ov)
            print(
                f"oracle: best sampled value {_fmt(ov)} at {_fmt_point(ox)} "
                f"({ORACLE_SAMPLES} points, seed {args.seed}); "
                f"bound consistent: {'yes' if ok else 'NO'}"
            )

    if args.report:
        result = {
            "status": status.value.lower(),
            "certified": res.certified,
            "order": int(order),
            "bound": res.bound,
            "value": value,
            "point": None if res.extracted is None else [float(v) for v in res.extracted],
        }
        if oracle_out is not None:
            result["oracle_point"] = [float(v) for v in oracle_out[0]]
            result["oracle_value"] = oracle_out[1]
        write_report(args.report, {
            "metadata": report_metadata(),
            "problem": {
                "kind": "polynomial",
                "n": n,
                "sense": sense_str,
                "source": str(args.file),
            },
            "result": result,
        })
    return 0 if res.certified else 2


def _emit_trace_outputs(trace, trace_path):
    from . import figures

    emit_trace_csv(trace_path, trace)
    figures.render_trace_figure(trace, _figure_path(trace_path))


def cmd_solve_frac(args):
    kind, n, sense_str, pair, constraints, fopts = _load_problem(args.file)
    if kind != "frac":
        raise CliError(
            f"{args.file}: objective is a plain polynomial; use solve-poly"
        )
    num, den = pair
    sense = Sense(sense_str)
    flipped = sense is Sense.MIN
    inner_num = poly_scale(num, -1.0) if flipped else num
    try:
        problem = FractionalProblem(
            n=n, numerator=inner_num, denominator=den, constraints=constraints
        )
    except ValueError as exc:
        raise CliError(f"{args.file}: {exc}")

    order = _pick(args.order, fopts, "order")
    if order is not None and order < 1:
        raise CliError(f"--order must be at least 1, got {order}")
    eps = float(_pick(args.eps, fopts, "eps", 1e-6))
    _require_positive("--eps", eps)
    max_outer = int(_pick(args.max_outer, fopts, "max_outer", 50))
    if max_outer < 1:
        raise CliError(f"--max-outer must be at least 1, got {max_outer}")
    opts = _relaxation_options(args, fopts)

    try:
        res = solve_fractional(
            problem, d=order, eps=eps, max_outer=max_outer, options=opts
        )
    except DenominatorNonPositive as exc:
        raise CliError(str(exc))

    if res.status in ("inner_infeasible", "inner_unbounded"):
        raise CliError(
            f"inner subproblem reported {res.status.removeprefix('inner_')}; "
            "no output written"
        )

    lam_out = -res.lam if flipped else res.lam
    value = None
    if res.x is not None:
        gx = evaluate(den, res.x)
        if gx > 0:
            value = evaluate(num, res.x) / gx

    oracle_out = None
    if args.oracle:
        oracle_out = _sampling_oracle(
            n, sense, constraints, args.seed, ratio=(num, den)
        )

    if args.trace:
        _emit_trace_outputs(res.trace, args.trace)

    print(f"status: {res.status}")
    print(f"order: {res.order_d}")
    print(f"lambda: {_fmt(lam_out)}")
    if res.x is not None:
        print(f"point: {_fmt_point(res.x)}")
        if value is not None:
            print(f"value: {_fmt(value)}")
    print(f"outer iterations: {len(res.trace)}")
    print(f"certified: {'yes' if res.certified else 'no'}")
    if args.oracle:
        if oracle_out is None:
            print("oracle: no feasible sample in the search box")
        else:
            ox, ov = oracle_out
            ok = _oracle_consistent(sense, lam_out, ov)
            print(
                f"oracle: best sampled ratio {_fmt(ov)} at {_fmt_point(ox)} "
                f"({ORACLE_SAMPLES} points, seed {args.seed}); "
                f"lambda consistent: {'yes' if ok else 'NO'}"
            )

    if args.report:
        notes = []
        if flipped:
            notes.append(
                "sense=min solved by maximizing the negated numerator; lambda "
                "and value are reported for the original minimization, trace "
                "rows show the internal maximization"
            )
        result = {
            "status": res.status,
            "certified": res.certified,
            "order": int(res.order_d),
            "bound": lam_out,
            "lambda": lam_out,
            "value": value,
            "point": None if res.x is None else [float(v) for v in res.x],
            "trace_summary": _trace_summary(res.trace),
        }
        if oracle_out is not None:
            result["oracle_point"] = [float(v) for v in oracle_out[0]]
            result["oracle_value"] = oracle_out[1]
        if notes:
            result["notes"] = notes
        write_report(args.report, {
            "metadata": report_metadata(),
            "problem": {
                "kind": "fractional",
                "n": n,
                "sense": sense_str,
                "source": str(args.file),
            },
            "result": result,
        })

    if res.status != "converged":
        print(f"error: outer iteration stopped with status {res.status}",
              file=sys.stderr)
        return 1
    return 0 if res.certified else 2


def cmd_solve_ee(args):
    doc = _load_json(args.file)
    _check_schema(doc, EE_CONFIG_SCHEMA, args.file)
    try:
        prob = load_objective(doc)
    except ValueError as exc:
        raise CliError(f"{args.file}: {exc}")

    order = args.order if args.order is not None else 6
    if order < 1:
        raise CliError(f"--order must be at least 1, got {order}")
    eps = args.eps if args.eps is not None else 1e-6
    _require_positive("--eps", eps)
    max_outer = args.max_outer if args.max_outer is not None else 50
    if max_outer < 1:
        raise CliError(f"--max-outer must be at least 1, got {max_outer}")
    opts = _relaxation_options(args, {})

    try:
        res = solve_ee(
            prob,
            d=order,
            eps=eps,
            max_outer=max_outer,
            oracle=args.oracle,
            options=opts,
        )
    except (DenominatorNonPositive, RuntimeError, ValueError) as exc:
        raise CliError(str(exc))

    best_mark = None
    if res.oracle is not None:
        best_mark = (res.oracle[0], res.oracle[1])
    elif res.rounded_feasible:
        best_mark = res.rounded

    if args.grid:
        from . import figures

        values = grid_values(prob)
        emit_grid_csv(args.grid, values)
        figures.render_grid_figure(values, _figure_path(args.grid), best=best_mark)

    if args.trace:
        _emit_trace_outputs(res.frac.trace, args.trace)
        if args.oracle and res.epsilon_trace is not None:
            from . import figures

            p = Path(args.trace)
            eps_csv = p.with_name(p.stem + "-epsilon.csv")
            emit_error_csv(eps_csv, res.epsilon_trace)
            figures.render_error_figure(res.epsilon_trace, _figure_path(eps_csv))

    print(f"status: {res.status}")
    print(f"order: {order}")
    print(f"continuous point: {_fmt_point(res.continuous)}")
    print(f"continuous value: {_fmt(res.continuous_ee)}")
    print(f"rounded point: ({res.rounded[0]}, {res.rounded[1]})")
    print(f"rounded value: {_fmt(res.rounded_ee)}")
    print(f"rounded feasible: {'yes' if res.rounded_feasible else 'no'}")
    if res.oracle is not None:
        ok, om, ov = res.oracle
        print(f"oracle optimum: ({ok}, {om}) value {_fmt(ov)}")
        print(f"relative error: {_fmt(res.epsilon)}")
    print(f"outer iterations: {len(res.frac.trace)}")
    print(f"certified: {'yes' if res.certified else 'no'}")

    if args.report:
        result = {
            "status": res.status,
            "certified": res.certified,
            "order": int(order),
            "bound": res.frac.trace[-1].bound if res.frac.trace else None,
            "lambda": res.frac.lam,
            "value": res.continuous_ee,
            "point": [float(v) for v in res.continuous],
            "rounded_point": [int(res.rounded[0]), int(res.rounded[1])],
            "rounded_value": res.rounded_ee,
            "rounded_feasible": res.rounded_feasible,
            "trace_summary": _trace_summary(res.frac.trace),
        }
        if res.oracle is not None:
            result["oracle_point"] = [float(res.oracle[0]), float(res.oracle[1])]
            result["oracle_value"] = res.oracle[2]
            result["epsilon"] = res.epsilon
        write_report(args.report, {
            "metadata": report_metadata(),
            "problem": {
                "kind": "energy",
                "n": 2,
                "sense": "max",
                "source": str(args.file),
            },
            "result": result,
        })

    if res.status != "converged":
        print(f"error: outer iteration stopped with status {res.status}",
              file=sys.stderr)
        return 1
    return 0 if res.certified and res.rounded_feasible else 2


def cmd_certify_sos(args):
    doc = _load_json(args.file)
    _check_schema(doc, SOS_FILE_SCHEMA, args.file)
    try:
        p = parse_polynomial(doc)
    except SchemaError as exc:
        raise CliError(f"{args.file}: {exc}")

    _require_positive("--feas-tol", args.feas_tol)
    _require_positive("--gap-tol", args.gap_tol)
    opts = SdpOptions()
    if args.feas_tol is not None:
        opts.feas_tol = float(args.feas_tol)
    if args.gap_tol is not None:
        opts.gap_tol = float(args.gap_tol)

    report = {
        "metadata": report_metadata(),
        "problem": {"kind": "sos", "n": p.n, "source": str(args.file)},
    }
    try:
        cert = sos_decompose(p, opts)
    except NotSos as exc:
        print(f"not a sum of squares: {exc.reason}")
        if args.report:
            report["result"] = {
                "status": "not_sos",
                "certified": False,
                "reason": exc.reason,
            }
            write_report(args.report, report)
        return 2
    except RuntimeError as exc:
        raise CliError(f"decomposition attempt failed without a verdict: {exc}")

    diff = reconstruct(cert) - p
    residual = max((abs(c) for c in diff.terms.values()), default=0.0)
    print(f"sum of squares: {len(cert.squares)} squares, "
          f"basis size {len(cert.basis.entries)}")
    print(f"reconstruction residual: {residual:.3e}")
    if args.report:
        report["result"] = {
            "status": "sos",
            "certified": True,
            "num_squares": len(cert.squares),
            "basis_size": len(cert.basis.entries),
            "residual": residual,
        }
        write_report(args.report, report)
    return 0


EXAMPLE1_NOTE = (
    "note: this problem is often quoted with the coefficient list "
    "[9, 0, -4, 2, 1, 2] and the minimizer (-1, 2). That pairing is "
    "inconsistent: (-1, 2) is not a stationary point of either version, "
    "and on the objective solved here it gives the value 5, not the "
    "minimum. With the final coefficient equal to 1 the unique minimizer "
    "is (-4/7, 16/7) with value 31/7; the two coefficient lists differ "
    "only in their last entry."
)


def cmd_example1(args):
    objective = Polynomial(2, {
        (0, 0): 9.0,
        (0, 1): -4.0,
        (2, 0): 2.0,
        (1, 1): 1.0,
        (0, 2): 1.0,
    })
    problem = PolyProblem(n=2, sense=Sense.MIN, objective=objective)
    res = solve_relaxation(problem, 1, RelaxationOptions())

    basis = enumerate_basis(2, 1)
    names = [_mono_str(m.exponents) for m in basis.entries]
    print("minimize 9 - 4*x2 + 2*x1^2 + x1*x2 + x2^2 over R^2")
    print("coefficients [9, 0, -4, 2, 1, 1] in the order "
          "(1, x1, x2, x1^2, x1*x2, x2^2)")
    print(f"monomial basis at order 1: [{', '.join(names)}]")
    size = len(basis.entries)
    print(f"moment matrix ({size} x {size}), entries y indexed by exponent:")
    for bi in basis.entries:
        row = []
        for bj in basis.entries:
            alpha = tuple(a + b for a, b in zip(bi.exponents, bj.exponents))
            row.append("y(" + ",".join(str(e) for e in alpha) + ")")
        print("  [" + " ".join(row) + "]")
    print(f"bound: {_fmt(res.bound)}")
    if res.extracted is not None:
        print(f"minimizer: {_fmt_point(res.extracted)}")
    print(f"certified: {'yes' if res.certified else 'no'} "
          f"(rank ratio {res.rank_ratio:.3e})")
    print(EXAMPLE1_NOTE)

    if args.report:
        value = None
        if res.extracted is not None:
            value = evaluate(objective, res.extracted)
        write_report(args.report, {
            "metadata": report_metadata(),
            "problem": {
                "kind": "polynomial",
                "n": 2,
                "sense": "min",
                "source": "builtin",
            },
            "result": {
                "status": res.solver.status.value.lower(),
                "certified": res.certified,
                "order": 1,
                "bound": res.bound,
                "value": value,
                "point": None if res.extracted is None
                else [float(v) for v in res.extracted],
                "notes": [EXAMPLE1_NOTE],
            },
        })
    return 0 if res.certified else 2


def _add_solver_flags(sp, outer=False, oracle=False):
    sp.add_argument("--order", type=int, metavar="D",
                    help="relaxation order d (default: smallest that fits)")
    sp.add_argument("--feas-tol", type=float, metavar="TOL",
                    help="interior-point feasibility tolerance")
    sp.add_argument("--gap-tol", type=float, metavar="TOL",
                    help="interior-point duality-gap tolerance")
    sp.add_argument("--report", metavar="PATH",
                    help="write a JSON run report to PATH")
    if outer:
        sp.add_argument("--eps", type=float, metavar="TOL",
                        help="outer-iteration convergence tolerance")
        sp.add_argument("--max-outer", type=int, metavar="N",
                        help="outer-iteration budget")
        sp.add_argument("--trace", metavar="PATH",
                        help="write the outer-iteration CSV and PNG to PATH")
    if oracle:
        sp.add_argument("--oracle", action="store_true",
                        help="compare against a seeded sampling oracle")
        sp.add_argument("--seed", type=int, default=0, metavar="N",
                        help="seed for the sampling oracle (default 0)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fracpoly",
        description="Global polynomial and fractional-polynomial optimization "
                    "with moment relaxations and sum-of-squares certificates.",
    )
    parser.add_argument("--version", action="version",
                        version=f"fracpoly {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-poly",
                        help="optimize a polynomial over a semialgebraic set")
    sp.add_argument("file", help="problem file (JSON)")
    _add_solver_flags(sp, oracle=True)
    sp.set_defaults(func=cmd_solve_poly)

    sf = sub.add_parser("solve-frac",
                        help="optimize a ratio of polynomials")
    sf.add_argument("file", help="problem file (JSON)")
    _add_solver_flags(sf, outer=True, oracle=True)
    sf.set_defaults(func=cmd_solve_frac)

    se = sub.add_parser("solve-ee",
                        help="run the energy-efficiency application")
    se.add_argument("file", help="coefficient config (JSON)")
    _add_solver_flags(se, outer=True)
    se.add_argument("--grid", metavar="PATH",
                    help="write the integer-grid surface CSV and PNG to PATH")
    se.add_argument("--oracle", action="store_true",
                    help="run the exhaustive integer search and report the "
                         "relative error")
    se.set_defaults(func=cmd_solve_ee)

    sc = sub.add_parser("certify-sos",
                        help="attempt a sum-of-squares decomposition")
    sc.add_argument("file", help="polynomial file (JSON)")
    sc.add_argument("--feas-tol", type=float, metavar="TOL",
                    help="interior-point feasibility tolerance")
    sc.add_argument("--gap-tol", type=float, metavar="TOL",
                    help="interior-point duality-gap tolerance")
    sc.add_argument("--report", metavar="PATH",
                    help="write a JSON run report to PATH")
    sc.set_defaults(func=cmd_certify_sos)

    se1 = sub.add_parser("example1",
                         help="solve the built-in quadratic demo")
    se1.add_argument("--report", metavar="PATH",
                     help="write a JSON run report to PATH")
    se1.set_defaults(func=cmd_example1)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
