"""Sparse polynomial arithmetic, bases, and the interchange format."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fracpoly.polynomials import (
    DegreeTooLarge,
    DimensionMismatch,
    MonomialBasis,
    MultiIndex,
    Polynomial,
    SchemaError,
    basis_size,
    enumerate_basis,
    evaluate,
    evaluate_many,
    monomial_vector,
    parse_polynomial,
    poly_mul,
    scale_variables,
    serialize_polynomial,
    to_coeff_vector,
)


def _random_poly(rng, n, deg, nterms=6):
    terms = {}
    for _ in range(nterms):
        total = int(rng.integers(0, deg + 1))
        alpha = [0] * n
        for _ in range(total):
            alpha[int(rng.integers(0, n))] += 1
        terms[tuple(alpha)] = terms.get(tuple(alpha), 0.0) + float(rng.normal())
    return Polynomial(n, terms)


def test_multiindex_degree_and_add():
    a = MultiIndex((2, 0, 1))
    b = MultiIndex((0, 3, 1))
    assert a.degree == 3
    assert (a + b).exponents == (2, 3, 2)


def test_basis_size_small_cases():
    assert basis_size(1, 1) == 2
    assert basis_size(2, 1) == 3
    assert basis_size(2, 2) == 6
    assert basis_size(2, 4) == 15
    assert basis_size(2, 6) == 28
    assert basis_size(3, 2) == 10
    assert basis_size(6, 10) == 8008


def test_basis_size_matches_binomial_exhaustively():
    for n in range(1, 7):
        for v in range(0, 11):
            assert basis_size(n, v) == math.comb(n + v, v)


def test_enumerate_basis_graded_and_complete():
    basis = enumerate_basis(2, 2)
    degs = [m.degree for m in basis.entries]
    assert degs == sorted(degs)
    assert len(set(basis.entries)) == basis.size == 6
    assert basis.entries[0].exponents == (0, 0)
    # every index is recoverable through the lookup
    for i, m in enumerate(basis.entries):
        assert basis.index(m) == i


def test_polynomial_canonical_form():
    p = Polynomial(2, {(1, 0): 1.0, (0, 0): 0.0})
    assert (0, 0) not in {a.exponents for a in p.terms}
    q = Polynomial(2, [((1, 0), 2.0), ((1, 0), -2.0)])
    assert not q
    assert q.degree == 0


def test_polynomial_arithmetic_matches_pointwise():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        p = _random_poly(rng, n, 3)
        q = _random_poly(rng, n, 3)
        x = rng.normal(size=n)
        assert math.isclose(
            evaluate(p + q, x), evaluate(p, x) + evaluate(q, x),
            rel_tol=1e-12, abs_tol=1e-9,
        )
        assert math.isclose(
            evaluate(p - q, x), evaluate(p, x) - evaluate(q, x),
            rel_tol=1e-12, abs_tol=1e-9,
        )
        assert math.isclose(
            evaluate(poly_mul(p, q), x), evaluate(p, x) * evaluate(q, x),
            rel_tol=1e-10, abs_tol=1e-8,
        )
        assert math.isclose(
            evaluate(3.5 * p - 1.0, x), 3.5 * evaluate(p, x) - 1.0,
            rel_tol=1e-12, abs_tol=1e-9,
        )


def test_evaluate_known_values():
    # 9 - 4*x2 + 2*x1^2 + x1*x2 + x2^2
    p = Polynomial(2, {
        (0, 0): 9.0, (0, 1): -4.0, (2, 0): 2.0, (1, 1): 1.0, (0, 2): 1.0,
    })
    assert math.isclose(evaluate(p, (-1.0, 2.0)), 5.0, abs_tol=1e-12)
    assert math.isclose(evaluate(p, (-4 / 7, 16 / 7)), 31 / 7, abs_tol=1e-12)


def test_evaluate_many_agrees_with_scalar():
    rng = np.random.default_rng(11)
    p = _random_poly(rng, 2, 4)
    pts = rng.normal(size=(50, 2))
    vals = evaluate_many(p, pts)
    for row, v in zip(pts, vals):
        assert math.isclose(v, evaluate(p, row), rel_tol=1e-12, abs_tol=1e-9)


def test_scale_variables_is_substitution():
    rng = np.random.default_rng(3)
    p = _random_poly(rng, 2, 4)
    scaled = scale_variables(p, (2.0, 0.5))
    for x in rng.normal(size=(10, 2)):
        assert math.isclose(
            evaluate(scaled, x), evaluate(p, (2.0 * x[0], 0.5 * x[1])),
            rel_tol=1e-10, abs_tol=1e-8,
        )


def test_coeff_vector_reproduces_polynomial():
    rng = np.random.default_rng(5)
    p = _random_poly(rng, 2, 3)
    basis = enumerate_basis(2, 3)
    c = to_coeff_vector(p, basis)
    for x in rng.normal(size=(10, 2)):
        z = monomial_vector(basis, x)
        assert math.isclose(float(c @ z), evaluate(p, x),
                            rel_tol=1e-10, abs_tol=1e-8)


def test_coeff_vector_rejects_degree_overflow():
    p = Polynomial(1, {(3,): 1.0})
    with pytest.raises(DegreeTooLarge):
        to_coeff_vector(p, enumerate_basis(1, 2))


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatch):
        Polynomial(2, {(1,): 1.0})
    with pytest.raises(DimensionMismatch):
        evaluate(Polynomial(2, {(1, 0): 1.0}), (1.0,))


def test_interchange_round_trip():
    p = Polynomial(2, {(0, 0): 1.5, (2, 1): -3.25})
    doc = serialize_polynomial(p)
    assert parse_polynomial(doc) == p
    # duplicates are summed on the way in
    doc["terms"].append({"exp": [2, 1], "c": 1.25})
    assert parse_polynomial(doc).coefficient((2, 1)) == -2.0


def test_interchange_rejects_malformed_input():
    with pytest.raises(SchemaError):
        parse_polynomial({"terms": []})
    with pytest.raises(SchemaError):
        parse_polynomial({"n": 2, "terms": [{"exp": [1], "c": 1.0}]})
    with pytest.raises(SchemaError):
        parse_polynomial({"n": 1, "terms": [{"exp": [1], "c": True}]})
    with pytest.raises(SchemaError):
        parse_polynomial({"n": 1, "terms": [{"exp": [1.5], "c": 1.0}]})
    with pytest.raises(SchemaError):
        parse_polynomial({"n": 1, "terms": [{"exp": [-1], "c": 1.0}]})
