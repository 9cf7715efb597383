"""
Zariski tangent spaces of the 22-wall family: differentiated pairing constraints,
slice normalization and exact kernel computation, with the closed-form tangent vector
and the end-geometry checks along the deformation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from hyperwalls.arrangement import (
    LETTER_TANGENT_PAIRS,
    LETTERS_22,
    NEGATIVE_SIGNS,
    NUMBERED,
    POSITIVE_SIGNS,
    THETA_PAIRS,
    Arrangement,
    Parameter,
    ParameterKind,
    builtin,
    numbered_wall,
)
from hyperwalls.errors import PreconditionError
from hyperwalls.linalg import row_reduce
from hyperwalls.minkowski import MinkVector, VectorKind, classify_vector, common_orthogonal, mink_dot
from hyperwalls.scalar import SQRT2, LaurentParam, Sign, is_zero, lift_like, sign_of

logger = logging.getLogger(__name__)

FORM_SIGNS = (-1, 1, 1, 1, 1)


class SystemMode(Enum):
    GAMMA22_SLICE = "Gamma22Slice"
    LAMBDA_RIGIDITY = "LambdaRigidity"
    LETTER_SLICE = "LetterSlice"


@dataclass(frozen=True)
class NormPreserving:
    wall: str


@dataclass(frozen=True)
class PairingPreserved:
    first: str
    second: str


@dataclass(frozen=True)
class ComponentZero:
    wall: str
    coord: int


@dataclass(frozen=True)
class ComponentFixed:
    """Euclidean component of the derivative along ``direction`` is zero."""

    wall: str
    direction: tuple


@lru_cache(maxsize=1)
def formal_orthogonal_pairs() -> tuple[tuple[str, str], ...]:
    """Wall pairs of the 22-wall family whose pairing vanishes identically in t."""
    family = builtin("Family22")
    pairs = []
    for i, a in enumerate(family.labels):
        for b in family.labels[i + 1:]:
            if family.pairing(a, b).is_zero():
                pairs.append((a, b))
    return tuple(pairs)


@dataclass
class ConstraintSystem:
    """Linear equations in the derivatives q_dot_i, one block of n+1 unknowns per wall."""

    arrangement: Arrangement
    mode: SystemMode
    equations: list = field(default_factory=list)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.arrangement.labels

    @property
    def width(self) -> int:
        return self.arrangement.dimension + 1

    @property
    def unknowns(self) -> int:
        return len(self.labels) * self.width

    def column(self, label: str, coord: int) -> int:
        return self.arrangement.index(label) * self.width + coord

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for eq in self.equations:
            out[type(eq).__name__] = out.get(type(eq).__name__, 0) + 1
        return out

    def row(self, eq) -> dict:
        arr = self.arrangement
        if isinstance(eq, NormPreserving):
            q = arr.wall(eq.wall)
            return {self.column(eq.wall, k): FORM_SIGNS[k] * q[k] for k in range(self.width) if not is_zero(q[k])}
        if isinstance(eq, PairingPreserved):
            qa, qb = arr.wall(eq.first), arr.wall(eq.second)
            row = {}
            for k in range(self.width):
                if not is_zero(qb[k]):
                    row[self.column(eq.first, k)] = FORM_SIGNS[k] * qb[k]
                if not is_zero(qa[k]):
                    row[self.column(eq.second, k)] = FORM_SIGNS[k] * qa[k]
            return row
        if isinstance(eq, ComponentZero):
            return {self.column(eq.wall, eq.coord): 1}
        if isinstance(eq, ComponentFixed):
            return {self.column(eq.wall, k): c for k, c in enumerate(eq.direction) if c}
        raise TypeError(f"unknown equation {eq!r}")

    def rows(self) -> list[dict]:
        return [self.row(eq) for eq in self.equations]

    def residuals(self, derivatives: dict[str, MinkVector]) -> list:
        """Value of every equation at the given derivative vectors."""
        out = []
        for row in self.rows():
            total = 0
            for col, coeff in row.items():
                label = self.labels[col // self.width]
                value = derivatives[label][col % self.width]
                if not is_zero(value):
                    total = total + coeff * value
            out.append(total)
        return out

    def is_solution(self, derivatives: dict[str, MinkVector]) -> bool:
        return all(is_zero(r) for r in self.residuals(derivatives))


def _slice(letters_fixed=("A", "B", "C"), width: int = 5) -> list:
    equations = [ComponentZero(label, k) for label in letters_fixed for k in range(width)]
    e4 = tuple(int(k == 4) for k in range(width))
    equations.append(ComponentFixed("D", e4))
    return equations


def build_system(arr: Arrangement, mode: SystemMode | str = SystemMode.GAMMA22_SLICE) -> ConstraintSystem:
    """
    Differentiated constraints of the 22-wall family at one exact parameter.

    Args:
        arr: Family22 (or Gamma22) at an exact parameter
        mode: Gamma22Slice, LambdaRigidity or LetterSlice

    Returns:
        ConstraintSystem
    """
    mode = SystemMode(mode) if not isinstance(mode, SystemMode) else mode
    if arr.parameter.kind is not ParameterKind.EXACT:
        raise PreconditionError(f"tangent systems need an exact parameter, got {arr.parameter}")
    missing = [label for label in NUMBERED + LETTERS_22 if label not in arr]
    if missing:
        raise PreconditionError(f"{arr.name} lacks walls {missing} of the 22-wall family")

    if mode is SystemMode.LETTER_SLICE:
        letters = arr.subset(LETTERS_22, name=f"{arr.name}[letters]")
        system = ConstraintSystem(letters, mode)
        system.equations += [NormPreserving(label) for label in LETTERS_22]
        system.equations += [PairingPreserved(a, b) for a, b in LETTER_TANGENT_PAIRS]
        system.equations += _slice()
        return system

    family = arr.subset(NUMBERED + LETTERS_22, name=arr.name)
    system = ConstraintSystem(family, mode)
    system.equations += [NormPreserving(label) for label in family.labels]
    system.equations += [PairingPreserved(a, b) for a, b in formal_orthogonal_pairs()]
    system.equations += [PairingPreserved(a, b) for a, b in LETTER_TANGENT_PAIRS]
    system.equations += _slice()
    if mode is SystemMode.LAMBDA_RIGIDITY:
        system.equations += [PairingPreserved(a, b) for a, b in THETA_PAIRS]
    logger.debug("%s system at t^2 = %s: %s", mode.value, arr.parameter, system.counts())
    return system


@dataclass(frozen=True)
class TangentReport:
    dimension: int
    basis: tuple[dict, ...]
    matched_closed_form: bool | None
    parameter: Parameter
    mode: SystemMode

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "parameter": str(self.parameter),
            "dimension": self.dimension,
            "basis": [{label: v.to_json() for label, v in vector.items()} for vector in self.basis],
            "matched_closed_form": self.matched_closed_form,
        }


def _flatten(system: ConstraintSystem, derivatives: dict[str, MinkVector]) -> list:
    return [c for label in system.labels for c in derivatives[label].coords]


def _proportional(u: list, v: list) -> bool:
    """u = c*v for some nonzero c."""
    pivot = next((i for i, x in enumerate(v) if not is_zero(x)), None)
    if pivot is None or is_zero(u[pivot]):
        return False
    ratio = u[pivot] / v[pivot]
    return all(is_zero(a - ratio * b) for a, b in zip(u, v))


def solve_kernel(system: ConstraintSystem) -> TangentReport:
    """Exact kernel of the system, as derivative vectors per wall."""
    rank, kernel = row_reduce(list(system.rows()), system.unknowns)
    ref = system.arrangement.parameter.kit.one
    basis = []
    for sparse in kernel:
        derivatives = {}
        for label in system.labels:
            start = system.column(label, 0)
            derivatives[label] = MinkVector(tuple(lift_like(sparse.get(start + k, 0), ref)
                                                  for k in range(system.width)))
        basis.append(derivatives)
    dimension = system.unknowns - rank
    matched = None
    if system.mode is SystemMode.GAMMA22_SLICE and dimension == 1:
        closed = closed_form_tangent(system.arrangement.parameter.t_squared)
        matched = _proportional(_flatten(system, basis[0]), _flatten(system, closed))
    logger.info("%s at t^2 = %s: %d unknowns, rank %d, kernel dimension %d",
                system.mode.value, system.arrangement.parameter, system.unknowns, rank, dimension)
    return TangentReport(dimension, tuple(basis), matched, system.arrangement.parameter, system.mode)


def closed_form_tangent(t0_squared, a=None) -> dict[str, MinkVector]:
    """
    Tangent vector of the family at t0, up to the scale a.

    Positive wall (sqrt2, s1, s2, s3, s4/t): (-a/t0^2)(sqrt2, s1, s2, s3, -s4*t0).
    Negative wall (sqrt2, s1, s2, s3, s4*t): a(sqrt2, s1, s2, s3, -s4/t0). Letters: 0.

    Args:
        t0_squared: exact t0^2 > 0
        a: scale; defaults to -t0/(1 + t0^2)

    Returns:
        dict wall label -> derivative vector
    """
    parameter = Parameter.exact(t0_squared)
    kit = parameter.kit
    t0 = kit.t
    if a is None:
        a = -t0 / (kit.one + parameter.t_squared)
    else:
        a = kit.const(a)
    out = {}
    for label, (s1, s2, s3, s4) in POSITIVE_SIGNS.items():
        scale = -a / parameter.t_squared
        out[label] = kit.vector(SQRT2, s1, s2, s3, -s4 * t0).scale(scale)
    for label, (s1, s2, s3, s4) in NEGATIVE_SIGNS.items():
        out[label] = kit.vector(SQRT2, s1, s2, s3, -s4 * kit.inv_t).scale(a)
    zero = kit.vector(0, 0, 0, 0, 0)
    for label in LETTERS_22:
        out[label] = zero
    return out


def finite_difference_residual(system: ConstraintSystem, derivatives: dict[str, MinkVector],
                               step: float = 1e-5) -> float:
    """Largest central-difference derivative of a constrained pairing along the derivative vectors."""
    t = system.arrangement.parameter.t_float
    walls = {label: q.to_float(t) for label, q in system.arrangement}
    dots = {label: v.to_float(t) for label, v in derivatives.items()}
    j = np.array(FORM_SIGNS[: system.width], dtype=float)

    def pairing(x, y):
        return float(np.sum(j * x * y))

    worst = 0.0
    for eq in system.equations:
        if isinstance(eq, NormPreserving):
            a = b = eq.wall
        elif isinstance(eq, PairingPreserved):
            a, b = eq.first, eq.second
        else:
            continue
        plus = pairing(walls[a] + step * dots[a], walls[b] + step * dots[b])
        minus = pairing(walls[a] - step * dots[a], walls[b] - step * dots[b])
        worst = max(worst, abs(plus - minus) / (2 * step))
    return worst


# --- ends of the polytope along the deformation -------------------------------------

EVEN_NEGATIVES = ("-0", "-2", "-4", "-6")
ODD_POSITIVES = ("+1", "+3", "+5", "+7")


def boundary_family(label: str, kit) -> tuple[MinkVector, MinkVector]:
    """
    The line V(r) = V0 + r*V1 through an even negative wall at r = 1.

    For -0 this is ((r+1)/sqrt2, r, r, r, -t).
    """
    if label not in EVEN_NEGATIVES:
        raise PreconditionError(f"boundary family is defined for {EVEN_NEGATIVES}, got {label}")
    s1, s2, s3, s4 = NEGATIVE_SIGNS[label]
    half = SQRT2 / 2
    v0 = kit.vector(half, 0, 0, 0, kit.t if s4 > 0 else -kit.t)
    v1 = kit.vector(half, s1, s2, s3, 0)
    return v0, v1


def boundary_partners(label: str) -> tuple[str, ...]:
    """The three odd positive walls orthogonal to an even negative wall for every t."""
    kit = Parameter.formal().kit
    wall = numbered_wall(label, kit)
    return tuple(p for p in ODD_POSITIVES if mink_dot(wall, numbered_wall(p, kit)).is_zero())


def boundary_family_check(parameter: Parameter | None = None, label: str = "-0") -> bool:
    """
    V(r) stays orthogonal to the partner walls identically in r (and in t when formal),
    and V(1) is the wall itself, space-like.
    """
    parameter = parameter or Parameter.formal()
    kit = parameter.kit
    v0, v1 = boundary_family(label, kit)
    partners = boundary_partners(label)
    if len(partners) != 3:
        logger.warning("%s has partners %s", label, partners)
        return False
    for p in partners:
        q = numbered_wall(p, kit)
        if not (is_zero(mink_dot(v0, q)) and is_zero(mink_dot(v1, q))):
            logger.info("boundary family of %s leaves %s", label, p)
            return False
    at_one = v0 + v1
    wall = numbered_wall(label, kit)
    if not (at_one - wall).is_zero():
        return False
    norm = mink_dot(at_one, at_one)
    if isinstance(norm, LaurentParam):
        return norm.positive_for_all_t()
    return sign_of(norm) is Sign.POSITIVE


class EndKind(Enum):
    FUCHSIAN = "Fuchsian"
    NOT_FUCHSIAN = "NotFuchsian"
    DEGENERATE_LIGHT_LIKE = "DegenerateLightLike"


@dataclass(frozen=True)
class EndVerdict:
    kind: EndKind
    hyperplane: MinkVector | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind.value,
                "hyperplane": self.hyperplane.to_json() if self.hyperplane is not None else None}


def fuchsian_end_test(arr: Arrangement, end_walls) -> EndVerdict:
    """Fuchsian iff the end walls have a one-dimensional space-like common orthogonal."""
    if arr.parameter.is_formal:
        raise PreconditionError("Fuchsian end test needs an exact parameter")
    walls = sorted(set(end_walls), key=arr.index)
    basis = common_orthogonal([arr.wall(label) for label in walls])
    if len(basis) != 1:
        logger.info("walls %s: common orthogonal of dimension %d", walls, len(basis))
        return EndVerdict(EndKind.NOT_FUCHSIAN)
    normal = basis[0]
    if sign_of(normal[0]) is Sign.NEGATIVE:
        normal = -normal
    kind = classify_vector(normal)
    if kind is VectorKind.SPACE_LIKE:
        return EndVerdict(EndKind.FUCHSIAN, normal)
    if kind is VectorKind.LIGHT_LIKE:
        return EndVerdict(EndKind.DEGENERATE_LIGHT_LIKE, normal)
    return EndVerdict(EndKind.NOT_FUCHSIAN, normal)


def exact_parameter(value) -> Parameter:
    return value if isinstance(value, Parameter) else Parameter.exact(value)


def tangent_report(t_squared, mode: SystemMode | str = SystemMode.GAMMA22_SLICE) -> TangentReport:
    """build_system then solve_kernel for the family at t^2."""
    family = builtin("Family22", exact_parameter(t_squared))
    return solve_kernel(build_system(family, mode))
