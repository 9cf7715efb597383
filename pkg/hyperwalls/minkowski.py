"""
Minkowski space R^{1,n}: the form -x0*y0 + x1*y1 + ... + xn*yn, vector types,
reflections and the pairwise geometry of hyperplanes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from hyperwalls.errors import DimensionMismatchError, PreconditionError
from hyperwalls.linalg import formal_nullspace, nullspace
from hyperwalls.scalar import (
    FLOAT_TOL,
    AngleKind,
    FieldElem,
    LaurentParam,
    ParamScalar,
    Sign,
    is_zero,
    lift_like,
    recognize_angle,
    sign_of,
    to_float,
)

logger = logging.getLogger(__name__)


def _scalar_kind(x) -> str:
    if isinstance(x, float):
        return "float"
    if isinstance(x, LaurentParam):
        return "formal"
    if isinstance(x, ParamScalar):
        return "param"
    return "exact"


def _vector_kind(coords) -> str:
    kinds = {_scalar_kind(c) for c in coords}
    if "float" in kinds and len(kinds) > 1:
        raise DimensionMismatchError("vector mixes float and exact coordinates")
    if {"formal", "param"} <= kinds:
        raise DimensionMismatchError("vector mixes formal and specialized parameters")
    for kind in ("float", "formal", "param"):
        if kind in kinds:
            return kind
    return "exact"


@dataclass(frozen=True)
class MinkVector:
    """Coordinates (x0, x1, ..., xn); x0 is the time-like coordinate."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        _vector_kind(self.coords)

    @classmethod
    def of(cls, *coords) -> MinkVector:
        return cls(tuple(coords))

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    @property
    def kind(self) -> str:
        return _vector_kind(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other: MinkVector) -> MinkVector:
        _check_dims(self, other)
        return MinkVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: MinkVector) -> MinkVector:
        _check_dims(self, other)
        return MinkVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> MinkVector:
        return MinkVector(tuple(-a for a in self.coords))

    def scale(self, s) -> MinkVector:
        return MinkVector(tuple(s * a for a in self.coords))

    def __rmul__(self, s) -> MinkVector:
        return self.scale(s)

    def map(self, fn) -> MinkVector:
        return MinkVector(tuple(fn(a) for a in self.coords))

    def is_zero(self) -> bool:
        return all(is_zero(a) for a in self.coords)

    def dot(self, other: MinkVector):
        return mink_dot(self, other)

    def to_float(self, t: float | None = None) -> np.ndarray:
        return np.array([to_float(a, t) for a in self.coords], dtype=float)

    def to_json(self) -> list:
        return [scalar_to_json(a) for a in self.coords]

    @classmethod
    def from_json(cls, data) -> MinkVector:
        return cls(tuple(scalar_from_json(a) for a in data))


def scalar_to_json(x):
    if isinstance(x, float):
        return x
    if isinstance(x, (FieldElem, ParamScalar, LaurentParam)):
        return x.to_json()
    return FieldElem(x).to_json()


def scalar_from_json(data):
    if isinstance(data, float):
        return data
    if isinstance(data, dict):
        if "laurent" in data:
            return LaurentParam({int(e): FieldElem.from_json(c) for e, c in data["laurent"].items()})
        return ParamScalar.from_json(data)
    return FieldElem.from_json(data)


def _check_dims(u: MinkVector, v: MinkVector) -> None:
    if len(u) != len(v):
        raise DimensionMismatchError(f"dimension mismatch: R^(1,{u.dimension}) vs R^(1,{v.dimension})")
    ku, kv = u.kind, v.kind
    if ku != kv and "float" in (ku, kv):
        raise DimensionMismatchError(f"scalar kinds differ: {ku} vs {kv}")
    if {ku, kv} == {"formal", "param"}:
        raise DimensionMismatchError("cannot pair a formal vector with a specialized one")


def mink_dot(u: MinkVector, v: MinkVector):
    _check_dims(u, v)
    total = -(u[0] * v[0])
    for a, b in zip(u.coords[1:], v.coords[1:]):
        if is_zero(a) or is_zero(b):
            continue
        total = total + a * b
    return total


def e(i: int, n: int = 4, one=1) -> MinkVector:
    """Standard basis vector e_i of R^(1,n)."""
    return MinkVector(tuple(one if k == i else 0 * one for k in range(n + 1)))


class VectorKind(Enum):
    SPACE_LIKE = "space_like"
    LIGHT_LIKE = "light_like"
    TIME_LIKE = "time_like"


def classify_vector(v: MinkVector) -> VectorKind:
    sign = sign_of(mink_dot(v, v))
    if sign is Sign.POSITIVE:
        return VectorKind.SPACE_LIKE
    if sign is Sign.ZERO:
        return VectorKind.LIGHT_LIKE
    return VectorKind.TIME_LIKE


def reflect(q: MinkVector, x: MinkVector) -> MinkVector:
    """Reflection in the hyperplane q-perp: x - 2(x,q)/(q,q) q."""
    if classify_vector(q) is not VectorKind.SPACE_LIKE:
        raise PreconditionError("reflection needs a space-like normal")
    s = 2 * mink_dot(x, q) / mink_dot(q, q)
    return x - q.scale(s)


def is_proportional(u: MinkVector, v: MinkVector) -> bool:
    _check_dims(u, v)
    n = len(u)
    for i in range(n):
        for j in range(i + 1, n):
            if not is_zero(u[i] * v[j] - u[j] * v[i]):
                return False
    return True


class RelationKind(Enum):
    ORTHOGONAL = "O"
    ANGLE_PI_OVER = "P"
    GENERIC_ANGLE = "G"
    TANGENT_AT_INFINITY = "T"
    ULTRAPARALLEL = "U"
    DIVERGING = "D"


@dataclass(frozen=True)
class PairRelation:
    """
    Relation between two walls, decided from c^2 = (q1,q2)^2/(N1*N2) and the sign of -(q1,q2).

    c = cos of the dihedral angle for intersecting walls, cosh of the distance for
    ultraparallel ones.
    """

    kind: RelationKind
    pairing: object
    c_sq: object
    sign: Sign
    k: int | None = None

    @property
    def intersecting(self) -> bool:
        return self.kind in (RelationKind.ORTHOGONAL, RelationKind.ANGLE_PI_OVER, RelationKind.GENERIC_ANGLE)

    @property
    def c(self) -> float:
        return self.sign.value * math.sqrt(max(float(self.c_sq), 0.0))

    @property
    def angle_degrees(self) -> float | None:
        if not self.intersecting:
            return None
        return math.degrees(math.acos(max(-1.0, min(1.0, self.c))))

    @property
    def code(self) -> str:
        if self.kind is RelationKind.ANGLE_PI_OVER:
            return f"P{self.k}"
        return self.kind.value

    def describe(self) -> str:
        if self.kind is RelationKind.ORTHOGONAL:
            return "pi/2"
        if self.kind is RelationKind.ANGLE_PI_OVER:
            return f"pi/{self.k}"
        if self.kind is RelationKind.GENERIC_ANGLE:
            return f"angle {self.angle_degrees:.4f} deg"
        if self.kind is RelationKind.TANGENT_AT_INFINITY:
            return "tangent"
        if self.kind is RelationKind.ULTRAPARALLEL:
            return f"ultraparallel, cosh = {self.c:.6f}"
        return "diverging"

    def to_json(self) -> dict:
        return {
            "kind": self.kind.name.lower(),
            "code": self.code,
            "c_squared": scalar_to_json(self.c_sq),
            "sign": self.sign.value,
            "c": self.c,
        }


def pair_relation(q1: MinkVector, q2: MinkVector) -> PairRelation:
    if q1.kind == "formal" or q2.kind == "formal":
        raise PreconditionError("pair relations need an exact or numeric parameter, not a formal t")
    n1, n2 = mink_dot(q1, q1), mink_dot(q2, q2)
    if sign_of(n1) is not Sign.POSITIVE or sign_of(n2) is not Sign.POSITIVE:
        raise PreconditionError("pair relation needs two space-like vectors")
    if is_proportional(q1, q2):
        raise PreconditionError("proportional vectors describe the same wall")
    p = mink_dot(q1, q2)
    sign = sign_of(-p)
    if is_zero(p):
        return PairRelation(RelationKind.ORTHOGONAL, p, p * p, Sign.ZERO, 2)
    c_sq = p * p / (n1 * n2)
    against_one = sign_of(c_sq - 1)
    if against_one is Sign.NEGATIVE:
        angle = recognize_angle(c_sq, sign)
        if angle.kind is AngleKind.PI_OVER:
            return PairRelation(RelationKind.ANGLE_PI_OVER, p, c_sq, sign, angle.k)
        return PairRelation(RelationKind.GENERIC_ANGLE, p, c_sq, sign)
    if sign is Sign.NEGATIVE:
        return PairRelation(RelationKind.DIVERGING, p, c_sq, sign)
    if against_one is Sign.ZERO:
        return PairRelation(RelationKind.TANGENT_AT_INFINITY, p, c_sq, sign)
    return PairRelation(RelationKind.ULTRAPARALLEL, p, c_sq, sign)


def common_orthogonal(vs: list[MinkVector]) -> list[MinkVector]:
    """
    Basis of {x : (x, v) = 0 for all v}, by exact elimination.

    With a formal t the kernel is taken over the rational functions in t and every basis
    vector is returned with Laurent polynomial coordinates.
    """
    if not vs:
        raise PreconditionError("common orthogonal of an empty family")
    size = len(vs[0])
    ref = next((c for v in vs for c in v.coords if not isinstance(c, int)), FieldElem(0))
    rows = []
    for v in vs:
        if len(v) != size:
            raise DimensionMismatchError("vectors of different dimensions")
        rows.append({i: (-c if i == 0 else c) for i, c in enumerate(v.coords) if not is_zero(c)})
    kernel = formal_nullspace(rows, size) if isinstance(ref, LaurentParam) else nullspace(rows, size)
    basis = []
    for sparse in kernel:
        basis.append(MinkVector(tuple(lift_like(sparse.get(i, 0), ref) for i in range(size))))
    return basis


def form_matrix(n: int = 4) -> np.ndarray:
    """diag(-1, 1, ..., 1) for the float backend."""
    j = np.eye(n + 1)
    j[0, 0] = -1.0
    return j


def float_gram(vectors: list[MinkVector], t: float | None = None) -> np.ndarray:
    v = np.array([q.to_float(t) for q in vectors])
    return v @ form_matrix(v.shape[1] - 1) @ v.T


def float_relation_code(g11: float, g22: float, g12: float, tol: float = FLOAT_TOL) -> str:
    """Float counterpart of pair_relation, returning the relation's kind letter."""
    if abs(g12) <= tol:
        return RelationKind.ORTHOGONAL.value
    c = -g12 / math.sqrt(g11 * g22)
    if abs(abs(c) - 1) <= tol:
        return RelationKind.TANGENT_AT_INFINITY.value if c > 0 else RelationKind.DIVERGING.value
    if abs(c) < 1:
        return "I"
    return RelationKind.ULTRAPARALLEL.value if c > 0 else RelationKind.DIVERGING.value
