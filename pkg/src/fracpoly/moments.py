"""Moment vectors and structured matrix specifications.

A relaxation of order d works with a pseudo-moment vector y indexed by
all multi-indices of degree <= 2d.  The moment matrix has rows and
columns indexed by the degree-<= d basis, with entry (i, j) referencing
y at beta_i + beta_j; a localizing matrix for a constraint polynomial h
weights shifted moments by the coefficients of h.  A MatrixSpec records
these affine dependencies symbolically, as (coefficient, y-position)
terms per entry, so the same structure serves both matrix assembly and
the semidefinite solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .polynomials import (
    DimensionMismatch,
    MonomialBasis,
    MultiIndex,
    Polynomial,
    enumerate_basis,
    monomial_vector,
)


class OrderTooSmall(ValueError):
    """The relaxation order cannot accommodate the constraint degree."""


@dataclass(frozen=True)
class MomentIndexMap:
    """Bijection between multi-indices of degree <= 2d and y positions."""

    n: int
    d: int
    y_basis: MonomialBasis

    @classmethod
    def build(cls, n: int, d: int) -> "MomentIndexMap":
        if d < 0:
            raise OrderTooSmall(f"relaxation order must be nonnegative, got {d}")
        return cls(n=n, d=d, y_basis=enumerate_basis(n, 2 * d))

    @property
    def size(self) -> int:
        return self.y_basis.size

    def position(self, alpha) -> int:
        return self.y_basis.index(alpha)


@dataclass(frozen=True)
class MatrixSpec:
    """Symmetric matrix-valued affine map of a moment vector.

    entry_terms(i, j) lists (coefficient, y_position) pairs; the
    assembled entry is the matching linear combination of y.  Both
    triangles are stored, and construction guarantees entry (i, j)
    equals entry (j, i) term for term.
    """

    side: int
    entries: Mapping[tuple[int, int], tuple[tuple[float, int], ...]]
    row_basis: MonomialBasis
    _coo: tuple = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def entry_terms(self, i: int, j: int) -> tuple[tuple[float, int], ...]:
        return self.entries.get((i, j), ())

    def coo(self):
        """Flattened (rows, cols, coefs, positions) arrays for assembly."""
        if self._coo is None:
            rows, cols, coefs, poss = [], [], [], []
            for (i, j), terms in self.entries.items():
                for c, pos in terms:
                    rows.append(i)
                    cols.append(j)
                    coefs.append(c)
                    poss.append(pos)
            arrays = (
                np.asarray(rows, dtype=np.intp),
                np.asarray(cols, dtype=np.intp),
                np.asarray(coefs, dtype=float),
                np.asarray(poss, dtype=np.intp),
            )
            object.__setattr__(self, "_coo", arrays)
        return self._coo

    def max_position(self) -> int:
        _, _, _, poss = self.coo()
        return int(poss.max()) if poss.size else -1


def moment_matrix_spec(n: int, d: int) -> MatrixSpec:
    """Moment matrix structure of order d: entry (i, j) is y[beta_i + beta_j]."""
    ymap = MomentIndexMap.build(n, d)
    row_basis = enumerate_basis(n, d)
    entries = {}
    for i, bi in enumerate(row_basis.entries):
        for j, bj in enumerate(row_basis.entries):
            entries[(i, j)] = ((1.0, ymap.position(bi + bj)),)
    return MatrixSpec(side=row_basis.size, entries=entries, row_basis=row_basis)


def localizing_matrix_spec(h: Polynomial, n: int, d: int) -> MatrixSpec:
    """Localizing matrix structure for a constraint h >= 0 at order d.

    The matrix is indexed by the basis of degree d - ceil(deg(h)/2);
    entry (i, j) is sum_alpha h_alpha y[alpha + beta_i + beta_j].
    """
    if h.n != n:
        raise DimensionMismatch(f"constraint has n={h.n}, expected {n}")
    if not h:
        raise ValueError("localizing matrix of the zero polynomial is undefined")
    ymap = MomentIndexMap.build(n, d)
    half = (h.degree + 1) // 2
    if d - half < 0:
        raise OrderTooSmall(
            f"order d={d} is too small for a constraint of degree {h.degree}"
        )
    row_basis = enumerate_basis(n, d - half)
    entries = {}
    for i, bi in enumerate(row_basis.entries):
        for j, bj in enumerate(row_basis.entries):
            shift = bi + bj
            terms = tuple(
                (c, ymap.position(alpha + shift)) for alpha, c in h.terms.items()
            )
            entries[(i, j)] = terms
    return MatrixSpec(side=row_basis.size, entries=entries, row_basis=row_basis)


def moments_from_point(x, d: int) -> np.ndarray:
    """Moment vector of the point mass at x, up to degree 2d."""
    xs = tuple(float(v) for v in x)
    ymap = MomentIndexMap.build(len(xs), d)
    return monomial_vector(ymap.y_basis, xs)


def assemble(spec: MatrixSpec, y) -> np.ndarray:
    """Dense symmetric matrix obtained by substituting the moment vector y."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DimensionMismatch(f"moment vector must be 1-d, got shape {y.shape}")
    if spec.max_position() >= y.size:
        raise DimensionMismatch(
            f"spec references y position {spec.max_position()}, "
            f"but y has length {y.size}"
        )
    rows, cols, coefs, poss = spec.coo()
    out = np.zeros((spec.side, spec.side))
    np.add.at(out, (rows, cols), coefs * y[poss])
    return out
