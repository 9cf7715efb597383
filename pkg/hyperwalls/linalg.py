"""
Linear algebra over the scalar tower.

Exact matrices are handed to sympy's DomainMatrix over ``WallField``, a sympy domain whose
elements are FieldElem (or ParamScalar for one fixed t^2); float matrices go to numpy.
Sparse rows are dicts {column: value} with zero entries left out.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np
import sympy
from sympy.polys.domains.characteristiczero import CharacteristicZero
from sympy.polys.domains.field import Field
from sympy.polys.domains.simpledomain import SimpleDomain
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import CoercionFailed

from hyperwalls.scalar import (
    FLOAT_TOL,
    ONE,
    ZERO,
    FieldElem,
    LaurentParam,
    ParamScalar,
    Sign,
    is_zero,
    lift_like,
    sign_of,
)

logger = logging.getLogger(__name__)

_RADICANDS = (1, 2, 5, 10)


class WallField(Field, CharacteristicZero, SimpleDomain):
    """Q(sqrt2, sqrt5), or F[t]/(t^2 - r) when ``r`` is given, as a sympy domain."""

    is_Numerical = True
    has_assoc_Ring = False
    has_assoc_Field = True

    def __init__(self, r: FieldElem | None = None):
        self.r = r
        if r is None:
            self.dtype = FieldElem
            self.zero, self.one = ZERO, ONE
            self.rep = self.alias = "F"
        else:
            self.dtype = ParamScalar
            self.zero, self.one = ParamScalar(ZERO, ZERO, r), ParamScalar(ONE, ZERO, r)
            self.rep = self.alias = f"F[t]/(t^2 - {r})"

    def __eq__(self, other):
        if isinstance(other, WallField):
            return self.r == other.r
        return NotImplemented

    def __hash__(self):
        return hash(("WallField", self.r))

    def new(self, value):
        return lift_like(value, self.one)

    def _field_to_sympy(self, x: FieldElem):
        return sympy.Add(*(sympy.Rational(c.numerator, c.denominator) * sympy.sqrt(k)
                           for c, k in zip(x.coefficients, _RADICANDS) if c))

    def to_sympy(self, a):
        if self.r is None:
            return self._field_to_sympy(a)
        return self._field_to_sympy(a.even) + self._field_to_sympy(a.odd) * sympy.sqrt(self._field_to_sympy(self.r))

    def from_sympy(self, a):
        if a.is_Rational:
            return self.new(Fraction(int(a.p), int(a.q)))
        raise CoercionFailed(f"expected a rational, got {a}")

    def from_ZZ(K1, a, K0):
        return K1.new(Fraction(int(a)))

    from_ZZ_python = from_ZZ_gmpy = from_ZZ

    def from_QQ(K1, a, K0):
        return K1.new(Fraction(int(a.numerator), int(a.denominator)))

    from_QQ_python = from_QQ_gmpy = from_QQ

    def is_positive(self, a):
        return sign_of(a) is Sign.POSITIVE

    def is_negative(self, a):
        return sign_of(a) is Sign.NEGATIVE

    def is_nonpositive(self, a):
        return sign_of(a) is not Sign.POSITIVE

    def is_nonnegative(self, a):
        return sign_of(a) is not Sign.NEGATIVE


@lru_cache(maxsize=None)
def wall_field(r: FieldElem | None = None) -> WallField:
    return WallField(r)


@lru_cache(maxsize=1)
def formal_ring():
    """F[t] as a sympy polynomial domain over WallField."""
    return wall_field().poly_ring(sympy.Symbol("t", positive=True))


def _domain_for(values) -> WallField | None:
    """The exact domain holding every value, or None when a float is present."""
    r = None
    for x in values:
        if isinstance(x, float):
            return None
        if isinstance(x, ParamScalar):
            r = x.r
    return wall_field(r)


def _dense(matrix, domain: WallField) -> DomainMatrix:
    rows = [[domain.new(x) for x in row] for row in matrix]
    return DomainMatrix(rows, (len(rows), len(rows[0]) if rows else 0), domain)


def _float_kernel(rows: list[dict], ncols: int) -> tuple[int, list[dict]]:
    if not rows:
        return 0, [{c: 1.0} for c in range(ncols)]
    a = np.array([[float(row.get(c, 0.0)) for c in range(ncols)] for row in rows])
    _, s, vt = np.linalg.svd(a)
    scale = max(1.0, float(s.max())) if s.size else 1.0
    rank = int((s > FLOAT_TOL * scale).sum())
    basis = [{c: float(v) for c, v in enumerate(vec) if abs(v) > FLOAT_TOL} for vec in vt[rank:]]
    return rank, basis


def row_reduce(rows, ncols: int) -> tuple[int, list[dict]]:
    """
    Rank and kernel basis of a linear system.

    Args:
        rows: sparse dicts {column: value} or dense sequences
        ncols: number of unknowns

    Returns:
        (rank, basis) with the basis as sparse dicts; exact kernels are read off the RREF,
        so each basis vector has a 1 in its free column.
    """
    rows = [row if isinstance(row, dict) else dict(enumerate(row)) for row in rows]
    rows = [{c: v for c, v in row.items() if not is_zero(v)} for row in rows]
    domain = _domain_for(v for row in rows for v in row.values())
    if domain is None:
        rank, basis = _float_kernel(rows, ncols)
    else:
        sparse = {i: {c: domain.new(v) for c, v in row.items()} for i, row in enumerate(rows) if row}
        matrix = DomainMatrix(sparse, (len(rows), ncols), domain)
        rref, pivots = matrix.rref()
        null = rref.nullspace_from_rref(pivots)
        rank = len(pivots)
        basis = [dict(vector) for _, vector in sorted(null.to_sdm().items())]
    logger.debug("row reduction: %d columns, rank %d", ncols, rank)
    return rank, basis


def nullspace(rows, ncols: int) -> list[dict]:
    """Basis of {x : row . x = 0 for all rows} as sparse dicts."""
    return row_reduce(rows, ncols)[1]


def _to_laurent(value) -> LaurentParam:
    return value if isinstance(value, LaurentParam) else LaurentParam.constant(value)


def formal_nullspace(rows, ncols: int) -> list[dict]:
    """
    Kernel over F(t) of rows with Laurent polynomial entries.

    Each row is multiplied by a power of t to clear negative exponents, the system is
    reduced fraction-free over F[t], and every basis vector comes back as Laurent
    polynomials with the common power of t divided out.
    """
    ring = formal_ring()
    sparse = {}
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            row = dict(enumerate(row))
        row = {c: _to_laurent(v) for c, v in row.items() if not is_zero(v)}
        if not row:
            continue
        low = min(min(v.terms) for v in row.values())
        sparse[i] = {c: ring.ring.from_dict({(e - low,): coeff for e, coeff in v.terms.items()})
                     for c, v in row.items()}
    matrix = DomainMatrix(sparse, (len(rows), ncols), ring)
    rref, _, pivots = matrix.rref_den(method="FF")
    null = rref.nullspace_from_rref(pivots)
    basis = []
    for _, vector in sorted(null.to_sdm().items()):
        entries = {c: LaurentParam({m[0]: coeff for m, coeff in p.terms()}) for c, p in vector.items()}
        low = min(min(v.terms) for v in entries.values())
        basis.append({c: LaurentParam({e - low: coeff for e, coeff in v.terms.items()})
                      for c, v in entries.items()})
    logger.debug("formal row reduction: %d columns, rank %d", ncols, len(pivots))
    return basis


def determinant(matrix):
    """Exact determinant over WallField (fraction-free); floats use numpy."""
    if not matrix:
        return 1
    domain = _domain_for(x for row in matrix for x in row)
    if domain is None:
        return float(np.linalg.det(np.array(matrix, dtype=float)))
    return _dense(matrix, domain).det()


def leading_minors(matrix) -> list:
    """
    Leading principal minors D_1, D_2, ...

    Stops after the first zero minor, which is returned as the last entry.
    """
    minors = []
    for k in range(1, len(matrix) + 1):
        minor = determinant([row[:k] for row in matrix[:k]])
        minors.append(minor)
        if is_zero(minor):
            break
    return minors


def is_positive_definite(matrix) -> bool:
    """Sylvester: all leading principal minors positive."""
    minors = leading_minors(matrix)
    return len(minors) == len(matrix) and all(sign_of(m) is Sign.POSITIVE for m in minors)


def principal_minors_nonnegative(matrix) -> bool:
    """Every principal minor >= 0, the exact semidefiniteness test."""
    n = len(matrix)
    domain = _domain_for(x for row in matrix for x in row)
    full = None if domain is None else _dense(matrix, domain)
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if full is None:
                minor = determinant([[matrix[i][j] for j in idx] for i in idx])
            else:
                minor = full.extract(list(idx), list(idx)).det()
            if sign_of(minor) is Sign.NEGATIVE:
                return False
    return True
