"""Sparse multivariate polynomials on graded-lexicographic monomial bases.

A polynomial in n variables is stored as a finite map from exponent
vectors (multi-indices) to float coefficients.  Exact zeros are never
stored, so two polynomials are equal iff their term maps are equal.
Monomial bases are enumerated in graded-lexicographic order: ascending
total degree, and within a degree block descending power of the first
variable, then the second, and so on.  For n = 2, v = 2 the order is

    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2)

The basis of degree <= v in n variables has C(n+v, v) elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

# Contractual cap for exact basis-size arithmetic.
_MAX_N_PLUS_V = 64
# Refuse to materialize bases beyond this many monomials.
_MAX_BASIS_ENUM = 10_000_000


class DimensionMismatch(ValueError):
    """Operands or arguments disagree on the number of variables."""


class RangeLimitError(ValueError):
    """Requested basis parameters exceed the supported range."""


class DegreeTooLarge(ValueError):
    """A polynomial term does not fit in the requested basis."""


class SchemaError(ValueError):
    """Structured polynomial input violates the interchange schema."""


@dataclass(frozen=True, order=False)
class MultiIndex:
    """Exponent vector of a monomial, e.g. (2, 1) for x1^2 x2."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        for e in exps:
            if e < 0:
                raise ValueError(f"negative exponent in multi-index {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def grlex_key(self) -> tuple:
        """Sort key realizing the graded-lexicographic order."""
        return (self.degree, tuple(-e for e in self.exponents))

    def __lt__(self, other: "MultiIndex") -> bool:
        return self.grlex_key() < other.grlex_key()

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if len(self.exponents) != len(other.exponents):
            raise DimensionMismatch(
                f"cannot add multi-indices of lengths "
                f"{len(self.exponents)} and {len(other.exponents)}"
            )
        return MultiIndex(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __iter__(self) -> Iterator[int]:
        return iter(self.exponents)

    def __len__(self) -> int:
        return len(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]


def _as_exponents(alpha, n: int | None = None) -> tuple[int, ...]:
    """Normalize a MultiIndex or iterable of ints to an exponent tuple."""
    if isinstance(alpha, MultiIndex):
        exps = alpha.exponents
    else:
        exps = tuple(int(e) for e in alpha)
        for e in exps:
            if e < 0:
                raise ValueError(f"negative exponent in multi-index {exps}")
    if n is not None and len(exps) != n:
        raise DimensionMismatch(
            f"multi-index {exps} has length {len(exps)}, expected {n}"
        )
    return exps


def basis_size(n: int, v: int) -> int:
    """Number of n-variate monomials of total degree <= v, C(n+v, v).

    Exact integer arithmetic; raises RangeLimitError when n + v > 64.
    """
    if n < 1:
        raise RangeLimitError(f"need at least one variable, got n={n}")
    if v < 0:
        raise RangeLimitError(f"degree bound must be nonnegative, got v={v}")
    if n + v > _MAX_N_PLUS_V:
        raise RangeLimitError(
            f"basis_size supports n + v <= {_MAX_N_PLUS_V}, got {n + v}"
        )
    return math.comb(n + v, v)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Exponent vectors of fixed total degree, first variable descending."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered monomial basis of all degrees <= v in n variables."""

    n: int
    v: int
    entries: tuple[MultiIndex, ...]
    _lookup: Mapping[tuple[int, ...], int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self._lookup is None:
            lookup = {m.exponents: i for i, m in enumerate(self.entries)}
            object.__setattr__(self, "_lookup", MappingProxyType(lookup))

    @property
    def size(self) -> int:
        return len(self.entries)

    def index(self, alpha) -> int:
        """Position of a multi-index in the basis order."""
        exps = _as_exponents(alpha, self.n)
        try:
            return self._lookup[exps]
        except KeyError:
            raise DegreeTooLarge(
                f"multi-index {exps} of degree {sum(exps)} is outside the "
                f"basis of degree <= {self.v}"
            ) from None

    def __contains__(self, alpha) -> bool:
        try:
            exps = _as_exponents(alpha, self.n)
        except (ValueError, DimensionMismatch):
            return False
        return exps in self._lookup

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def enumerate_basis(n: int, v: int) -> MonomialBasis:
    """Materialize the graded-lexicographic basis of degree <= v."""
    size = basis_size(n, v)
    if size > _MAX_BASIS_ENUM:
        raise RangeLimitError(
            f"refusing to enumerate a basis with {size} monomials "
            f"(limit {_MAX_BASIS_ENUM})"
        )
    entries = []
    for total in range(v + 1):
        for exps in _compositions(total, n):
            entries.append(MultiIndex(exps))
    return MonomialBasis(n=n, v=v, entries=tuple(entries))


class Polynomial:
    """Immutable sparse polynomial with float coefficients.

    The canonical form stores no exact-zero coefficients; tiny nonzero
    values are kept as is.  The zero polynomial has degree 0 by
    convention.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        if n < 1:
            raise DimensionMismatch(f"need at least one variable, got n={n}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[MultiIndex, float] = {}
        for alpha, c in items:
            idx = alpha if isinstance(alpha, MultiIndex) else MultiIndex(_as_exponents(alpha))
            if idx.n != n:
                raise DimensionMismatch(
                    f"term {idx.exponents} has {idx.n} variables, expected {n}"
                )
            c = float(c)
            if c == 0.0:
                continue
            acc[idx] = acc.get(idx, 0.0) + c
        self._n = n
        self._terms = {a: c for a, c in acc.items() if c != 0.0}

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[MultiIndex, float]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(a.degree for a in self._terms)

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c: float) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        """The monomial x_{i+1}, zero-based i."""
        if not 0 <= i < n:
            raise DimensionMismatch(f"variable index {i} out of range for n={n}")
        exps = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, {exps: 1.0})

    def coefficient(self, alpha) -> float:
        exps = _as_exponents(alpha, self._n)
        return self._terms.get(MultiIndex(exps), 0.0)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self._n, other)
        return poly_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self._n, other)
        return poly_add(self, poly_scale(other, -1.0))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return poly_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return poly_scale(self, float(other))
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return f"Polynomial({self._n}, 0)"
        parts = []
        for a in sorted(self._terms):
            c = self._terms[a]
            mono = "*".join(
                f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}"
                for i, e in enumerate(a.exponents)
                if e > 0
            )
            parts.append(f"{c:g}*{mono}" if mono else f"{c:g}")
        return f"Polynomial({self._n}, {' + '.join(parts)})"


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    """Coefficientwise sum; exact cancellations are pruned."""
    if p.n != q.n:
        raise DimensionMismatch(f"cannot add polynomials with n={p.n} and n={q.n}")
    acc = dict(p.terms)
    for a, c in q.terms.items():
        acc[a] = acc.get(a, 0.0) + c
    return Polynomial(p.n, acc)


def poly_scale(p: Polynomial, c: float) -> Polynomial:
    c = float(c)
    if c == 0.0:
        return Polynomial.zero(p.n)
    return Polynomial(p.n, {a: c * v for a, v in p.terms.items()})


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Distributive product over the sparse term maps."""
    if p.n != q.n:
        raise DimensionMismatch(f"cannot multiply polynomials with n={p.n} and n={q.n}")
    acc: dict[MultiIndex, float] = {}
    for a, ca in p.terms.items():
        for b, cb in q.terms.items():
            key = a + b
            acc[key] = acc.get(key, 0.0) + ca * cb
    return Polynomial(p.n, acc)


def evaluate(p: Polynomial, x) -> float:
    """Evaluate at a point given as a length-n sequence of floats."""
    xs = tuple(float(v) for v in x)
    if len(xs) != p.n:
        raise DimensionMismatch(f"point has length {len(xs)}, expected {p.n}")
    total = 0.0
    for a, c in p.terms.items():
        m = 1.0
        for xi, e in zip(xs, a.exponents):
            if e:
                m *= xi**e
        total += c * m
    return total


def evaluate_many(p: Polynomial, pts: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on an (m, n) array of points."""
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != p.n:
        raise DimensionMismatch(f"expected an (m, {p.n}) point array, got {pts.shape}")
    out = np.zeros(pts.shape[0])
    for a, c in p.terms.items():
        m = np.ones(pts.shape[0])
        for j, e in enumerate(a.exponents):
            if e:
                m = m * pts[:, j] ** e
        out += c * m
    return out


def monomial_vector(basis: MonomialBasis, x) -> np.ndarray:
    """Evaluate every basis monomial at x, in basis order."""
    xs = tuple(float(v) for v in x)
    if len(xs) != basis.n:
        raise DimensionMismatch(f"point has length {len(xs)}, expected {basis.n}")
    out = np.empty(basis.size)
    for i, a in enumerate(basis.entries):
        m = 1.0
        for xi, e in zip(xs, a.exponents):
            if e:
                m *= xi**e
        out[i] = m
    return out


def to_coeff_vector(p: Polynomial, basis: MonomialBasis) -> np.ndarray:
    """Dense coefficient vector of p on the given basis.

    Raises DegreeTooLarge if p has a term outside the basis.
    """
    if p.n != basis.n:
        raise DimensionMismatch(
            f"polynomial has n={p.n}, basis has n={basis.n}"
        )
    out = np.zeros(basis.size)
    for a, c in p.terms.items():
        out[basis.index(a)] = c
    return out


def scale_variables(p: Polynomial, scales) -> Polynomial:
    """Substitute x_i -> scales[i] * x_i.

    Used to condition problems posed on large boxes: the coefficient of
    x^alpha is multiplied by prod(scales^alpha).
    """
    s = tuple(float(v) for v in scales)
    if len(s) != p.n:
        raise DimensionMismatch(f"got {len(s)} scales for n={p.n}")
    acc = {}
    for a, c in p.terms.items():
        f = 1.0
        for si, e in zip(s, a.exponents):
            if e:
                f *= si**e
        acc[a] = c * f
    return Polynomial(p.n, acc)


def parse_polynomial(obj) -> Polynomial:
    """Build a polynomial from the interchange form.

    Schema: {"n": int, "terms": [{"exp": [e1, ..., en], "c": float}, ...]}.
    Duplicate exponent entries are summed.
    """
    if not isinstance(obj, Mapping):
        raise SchemaError(f"expected a mapping, got {type(obj).__name__}")
    if "n" not in obj:
        raise SchemaError("polynomial object is missing the 'n' field")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError(f"'n' must be a positive integer, got {n!r}")
    raw_terms = obj.get("terms", [])
    if not isinstance(raw_terms, (list, tuple)):
        raise SchemaError("'terms' must be a list")
    pairs = []
    for k, t in enumerate(raw_terms):
        if not isinstance(t, Mapping) or "exp" not in t or "c" not in t:
            raise SchemaError(
                f"terms[{k}] must be an object with 'exp' and 'c' fields"
            )
        exp = t["exp"]
        if not isinstance(exp, (list, tuple)) or len(exp) != n:
            raise SchemaError(
                f"terms[{k}].exp must be a list of {n} integers, got {exp!r}"
            )
        for e in exp:
            if not isinstance(e, int) or isinstance(e, bool) or e < 0:
                raise SchemaError(
                    f"terms[{k}].exp contains a non-integer or negative entry: {e!r}"
                )
        c = t["c"]
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise SchemaError(f"terms[{k}].c must be a finite number, got {c!r}")
        pairs.append((tuple(exp), float(c)))
    return Polynomial(n, pairs)


def serialize_polynomial(p: Polynomial) -> dict:
    """Interchange form of p; inverse of parse_polynomial on canonical input."""
    terms = [
        {"exp": list(a.exponents), "c": p.terms[a]}
        for a in sorted(p.terms)
    ]
    return {"n": p.n, "terms": terms}
