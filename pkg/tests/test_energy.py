"""Energy-efficiency application: config loading, grids, and the full solve."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from fracpoly.energy import (
    DENOMINATOR_SUPPORT,
    NUMERATOR_SUPPORT,
    EEParams,
    EEProblem,
    constraint_coeffs,
    exhaustive_search,
    grid_values,
    load_config,
    load_objective,
    solve_ee,
)
from fracpoly.polynomials import Polynomial

CONFIG_PATH = Path(__file__).resolve().parent.parent / "configs" / "ee-synthetic.json"

# spot values recomputed by hand from the closed-form coefficient
# table at gamma=3, tau=400, alpha=3.7, snr=1 (linear)
SPOT = {
    "h1": {
        (0, 0): -2611.7647058823527,
        (1, 0): -5227.058823529412,
        (0, 1): 400.0,
        (1, 1): -1.1111111111111112,
        (2, 0): -8.79277201076509,
    },
    "h2": {
        (0, 0): 9.529411764705882,
        (1, 0): 21.851595540176852,
        (0, 1): -1.8888888888888888,
    },
}


def _synthetic_config():
    return json.loads(CONFIG_PATH.read_text())


def test_params_validation():
    with pytest.raises(ValueError):
        EEParams(gamma=-1.0, tau=400.0, alpha=3.7, snr=1.0)
    with pytest.raises(ValueError):
        EEParams(gamma=3.0, tau=0.5, alpha=3.7, snr=1.0)
    with pytest.raises(ValueError):
        EEParams(gamma=3.0, tau=400.0, alpha=2.0, snr=1.0)
    with pytest.raises(ValueError):
        EEParams(gamma=3.0, tau=400.0, alpha=3.7, snr=1.0, snr_unit="percent")


def test_snr_decibel_conversion():
    p = EEParams(gamma=3.0, tau=400.0, alpha=3.7, snr=20.0, snr_unit="dB")
    assert math.isclose(p.snr_linear, 100.0, rel_tol=1e-12)
    q = EEParams(gamma=3.0, tau=400.0, alpha=3.7, snr=2.5)
    assert q.snr_linear == 2.5


def test_constraint_coefficients_match_hand_values():
    params = EEParams(gamma=3.0, tau=400.0, alpha=3.7, snr=1.0)
    h1, h2 = constraint_coeffs(params)
    for alpha, expected in SPOT["h1"].items():
        assert math.isclose(h1.coefficient(alpha), expected, rel_tol=1e-12), alpha
    for alpha, expected in SPOT["h2"].items():
        assert math.isclose(h2.coefficient(alpha), expected, rel_tol=1e-12), alpha
    assert len(h1.terms) == 5
    assert len(h2.terms) == 3


def test_objective_support_is_enforced():
    config = _synthetic_config()
    del config["objective"]["f"]["(1,1)"]
    with pytest.raises(ValueError, match=r"\(1,\s?1\)"):
        load_objective(config)

    config = _synthetic_config()
    config["objective"]["g"]["(5,5)"] = 1.0
    with pytest.raises(ValueError, match=r"\(5,\s?5\)"):
        load_objective(config)

    config = _synthetic_config()
    config["objective"]["f"]["(1,0)"] = True
    with pytest.raises(ValueError):
        load_objective(config)


def test_support_constants_cover_published_shape():
    assert len(NUMERATOR_SUPPORT) == 5
    assert len(DENOMINATOR_SUPPORT) == 9
    assert set(NUMERATOR_SUPPORT) < set(DENOMINATOR_SUPPORT)


def test_load_config_round_trip(tmp_path):
    prob = load_config(CONFIG_PATH)
    assert prob.k_max == 40
    assert prob.m_max == 256
    assert prob.params.gamma == 3.0
    assert math.isclose(prob.params.snr_linear, 100.0)
    # denominator positive on the whole feasible grid by construction
    assert prob.ee(16, 125) > 0


def test_missing_param_is_reported(tmp_path):
    config = _synthetic_config()
    del config["params"]["tau"]
    with pytest.raises(ValueError, match="tau"):
        load_objective(config)


def test_exhaustive_search_finds_designed_optimum():
    # coefficients were chosen so the continuous maximizer lands on
    # the integer point (16, 125): 0.01 * 16^2 * 125 = 0.00128 * 16 *
    # 125^2 = 320 balances both load terms against the static power
    prob = load_config(CONFIG_PATH)
    k, m, ee = exhaustive_search(prob)
    assert (k, m) == (16, 125)
    assert math.isclose(ee, 25.0 / 12.0, rel_tol=1e-12)


def test_feasibility_corridor():
    prob = load_config(CONFIG_PATH)
    assert prob.feasible(16, 125)
    assert not prob.feasible(16, 10)
    assert not prob.feasible(16, 250)


def test_grid_values_cover_lexicographic_grid():
    prob = load_config(CONFIG_PATH)
    values = grid_values(prob)
    assert len(values) == prob.k_max * prob.m_max
    assert values[0][:2] == (1, 1)
    assert values[-1][:2] == (prob.k_max, prob.m_max)
    pairs = [(v[0], v[1]) for v in values]
    assert pairs == sorted(pairs)
    by_pair = {(v[0], v[1]): v for v in values}
    k, m, ee = exhaustive_search(prob)
    assert by_pair[(k, m)][3] is True
    assert math.isclose(by_pair[(k, m)][2], ee, rel_tol=1e-12)


def test_exhaustive_tie_breaks_lexicographically():
    # constant ratio: every grid point ties, so the smallest (K, M) wins
    params = EEParams(gamma=3.0, tau=400.0, alpha=3.7, snr=1.0)
    prob = EEProblem(
        params=params,
        numerator=Polynomial(2, {(1, 0): 2.0}),
        denominator=Polynomial(2, {(1, 0): 1.0}),
        constraints=(),
        k_max=3,
        m_max=3,
    )
    k, m, ee = exhaustive_search(prob)
    assert (k, m) == (1, 1)
    assert ee == 2.0


_SOLVED = None


def _solved_synthetic():
    # the order-6 solve takes a couple of seconds; share it between tests
    global _SOLVED
    if _SOLVED is None:
        _SOLVED = solve_ee(load_config(CONFIG_PATH), d=6, eps=1e-6, oracle=True)
    return _SOLVED


def test_solve_ee_matches_oracle_end_to_end():
    res = _solved_synthetic()
    assert res.status == "converged"
    assert res.certified
    assert res.rounded == (16, 125)
    assert res.rounded_feasible
    assert res.oracle[:2] == (16, 125)
    assert res.epsilon is not None and res.epsilon <= 1e-3
    # continuous iterate sits within a tenth of a unit of the optimum
    assert abs(res.continuous[0] - 16.0) <= 0.1
    assert abs(res.continuous[1] - 125.0) <= 0.5


def test_epsilon_trace_decreases_to_zero():
    res = _solved_synthetic()
    trace = res.epsilon_trace
    assert trace is not None and len(trace) == len(res.frac.trace)
    finite = [(k, e) for k, e in trace if not math.isnan(e)]
    assert finite, "no iterate produced a feasible rounding"
    eps_values = [e for _, e in finite]
    assert all(b <= a + 1e-12 for a, b in zip(eps_values, eps_values[1:]))
    assert eps_values[-1] == 0.0
