"""
Labeled wall arrangements: the hyperbolic 24-cell, its 22-wall subgroup and the
one-parameter deformation family, plus relations, diagrams, ideal vertices and
symmetry checks.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property

import networkx as nx
import pandas as pd
from tqdm import tqdm

from hyperwalls.errors import LiteralError, PreconditionError, SymmetryError
from hyperwalls.minkowski import (
    MinkVector,
    PairRelation,
    RelationKind,
    VectorKind,
    classify_vector,
    is_proportional,
    mink_dot,
    pair_relation,
)
from hyperwalls.scalar import (
    ONE,
    PI_OVER_COS_SQ,
    SQRT2,
    ZERO,
    FieldElem,
    LaurentParam,
    ParamScalar,
    Sign,
    is_zero,
    parse_exact,
    sign_of,
)
from hyperwalls.vinberg import cusp_rank

logger = logging.getLogger(__name__)


# --- parameter ---------------------------------------------------------------

class ParameterKind(Enum):
    FORMAL = "formal"
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class Parameter:
    """Deformation parameter t > 0: formal, exact t^2 in F, or a float t."""

    kind: ParameterKind
    t_squared: FieldElem | None = None
    t_value: float | None = None
    literal: str | None = field(default=None, compare=False)

    @classmethod
    def formal(cls) -> Parameter:
        return cls(ParameterKind.FORMAL, literal="t")

    @classmethod
    def exact(cls, t_squared, literal: str | None = None) -> Parameter:
        if isinstance(t_squared, str):
            literal = literal or t_squared
            t_squared = parse_exact(t_squared)
        t_squared = FieldElem(t_squared) if not isinstance(t_squared, FieldElem) else t_squared
        if sign_of(t_squared) is not Sign.POSITIVE:
            raise PreconditionError(f"t^2 must be positive, got {t_squared}")
        return cls(ParameterKind.EXACT, t_squared=t_squared, literal=literal or str(t_squared))

    @classmethod
    def numeric(cls, t: float, literal: str | None = None) -> Parameter:
        if not t > 0:
            raise PreconditionError(f"t must be positive, got {t}")
        return cls(ParameterKind.FLOAT, t_value=float(t), literal=literal or repr(float(t)))

    @property
    def is_formal(self) -> bool:
        return self.kind is ParameterKind.FORMAL

    @property
    def t_float(self) -> float | None:
        if self.kind is ParameterKind.EXACT:
            return math.sqrt(float(self.t_squared))
        return self.t_value

    def inverse(self) -> Parameter:
        """The parameter 1/t."""
        if self.kind is ParameterKind.EXACT:
            return Parameter.exact(ONE / self.t_squared)
        if self.kind is ParameterKind.FLOAT:
            return Parameter.numeric(1.0 / self.t_value)
        return self

    @cached_property
    def kit(self) -> ScalarKit:
        return ScalarKit.for_parameter(self)

    def to_json(self) -> dict:
        data = {"kind": self.kind.value, "literal": self.literal}
        if self.kind is ParameterKind.EXACT:
            data["t_squared"] = self.t_squared.to_json()
        elif self.kind is ParameterKind.FLOAT:
            data["t"] = self.t_value
        return data

    @classmethod
    def from_json(cls, data: dict) -> Parameter:
        kind = data.get("kind")
        if kind == "formal":
            return cls.formal()
        if kind == "exact":
            return cls.exact(FieldElem.from_json(data["t_squared"]), literal=data.get("literal"))
        if kind == "float":
            return cls.numeric(float(data["t"]), literal=data.get("literal"))
        raise LiteralError(f"unknown parameter kind {kind!r}")

    def __str__(self) -> str:
        return self.literal or self.kind.value


@dataclass(frozen=True)
class ScalarKit:
    """Constants of one scalar kind: 1, sqrt2, t and 1/t."""

    one: object
    sqrt2: object
    t: object
    inv_t: object

    @classmethod
    def for_parameter(cls, parameter: Parameter) -> ScalarKit:
        if parameter.kind is ParameterKind.FORMAL:
            return cls(LaurentParam.constant(ONE), LaurentParam.constant(SQRT2),
                       LaurentParam.t(), LaurentParam({-1: ONE}))
        if parameter.kind is ParameterKind.FLOAT:
            t = parameter.t_value
            return cls(1.0, math.sqrt(2.0), t, 1.0 / t)
        r = parameter.t_squared
        root = r.sqrt()
        if root is not None:
            return cls(ONE, SQRT2, root, ONE / root)
        return cls(ParamScalar(ONE, ZERO, r), ParamScalar(SQRT2, ZERO, r),
                   ParamScalar(ZERO, ONE, r), ParamScalar(ZERO, ONE / r, r))

    def const(self, value):
        """Lift an int, Fraction or FieldElem constant into this kind."""
        if isinstance(self.one, float):
            return float(value)
        return self.one * value

    def vector(self, *coords) -> MinkVector:
        return MinkVector(tuple(c if not isinstance(c, (int, Fraction, FieldElem)) else self.const(c)
                                for c in coords))


# --- walls --------------------------------------------------------------------

# (s1, s2, s3, s4): positive walls (sqrt2, s1, s2, s3, s4/t), negative walls (sqrt2, s1, s2, s3, s4*t)
POSITIVE_SIGNS = {
    "+0": (1, 1, 1, 1), "+1": (1, -1, 1, -1), "+2": (1, -1, -1, 1), "+3": (1, 1, -1, -1),
    "+4": (-1, 1, -1, 1), "+5": (-1, 1, 1, -1), "+6": (-1, -1, 1, 1), "+7": (-1, -1, -1, -1),
}
NEGATIVE_SIGNS = {
    "-0": (1, 1, 1, -1), "-1": (1, -1, 1, 1), "-2": (1, -1, -1, -1), "-3": (1, 1, -1, 1),
    "-4": (-1, 1, -1, -1), "-5": (-1, 1, 1, 1), "-6": (-1, -1, 1, -1), "-7": (-1, -1, -1, 1),
}
# letter wall = (1, +-sqrt2 e_axis)
LETTER_AXES = {
    "A": (1, 1), "B": (2, 1), "C": (3, 1), "D": (3, -1),
    "E": (2, -1), "F": (1, -1), "G": (4, -1), "H": (4, 1),
}
SYMMETRY_WALLS = {
    "L": (0, -1, 1, 0, 0),
    "M": (0, 0, -1, 1, 0),
    "N": (0, 0, -1, -1, 0),
}

NUMBERED = tuple(POSITIVE_SIGNS) + tuple(NEGATIVE_SIGNS)
LETTERS_22 = ("A", "B", "C", "D", "E", "F")
EXTENDED_LABELS = ("+0", "-0", "+3", "-3", "A", "L", "M", "N")

# pairs meeting at angle theta for t < 1, cos(theta) = (3t^2 - 1)/(1 + t^2)
THETA_PAIRS = (
    ("+1", "+3"), ("+3", "+5"), ("+5", "+7"), ("+7", "+1"), ("+1", "+5"), ("+3", "+7"),
    ("+2", "+0"), ("+0", "+4"), ("+4", "+6"), ("+6", "+2"), ("+2", "+4"), ("+0", "+6"),
)
# pairs at distance ell for t < 1, cosh(ell) = (3 - t^2)/(1 + t^2)
ELL_PAIRS = (
    ("-2", "-0"), ("-0", "-4"), ("-4", "-6"), ("-6", "-2"), ("-2", "-4"), ("-0", "-6"),
    ("-1", "-3"), ("-3", "-5"), ("-5", "-7"), ("-7", "-1"), ("-1", "-5"), ("-3", "-7"),
)
OPPOSITE_LETTERS = ({"A", "F"}, {"B", "E"}, {"C", "D"})
LETTER_TANGENT_PAIRS = tuple(
    (a, b) for a, b in itertools.combinations(LETTERS_22, 2) if {a, b} not in OPPOSITE_LETTERS
)


def octet_of(label: str) -> str:
    if label in POSITIVE_SIGNS:
        return "positive"
    if label in NEGATIVE_SIGNS:
        return "negative"
    if label in LETTER_AXES:
        return "letter"
    if label in SYMMETRY_WALLS:
        return "symmetry"
    return "other"


def numbered_wall(label: str, kit: ScalarKit) -> MinkVector:
    if label in POSITIVE_SIGNS:
        s1, s2, s3, s4 = POSITIVE_SIGNS[label]
        last = kit.inv_t if s4 > 0 else -kit.inv_t
    else:
        s1, s2, s3, s4 = NEGATIVE_SIGNS[label]
        last = kit.t if s4 > 0 else -kit.t
    return kit.vector(SQRT2, s1, s2, s3, last)


def letter_wall(label: str, kit: ScalarKit) -> MinkVector:
    axis, sign = LETTER_AXES[label]
    coords = [1, 0, 0, 0, 0]
    coords[axis] = SQRT2 * sign
    return kit.vector(*coords)


def symmetry_wall(label: str, kit: ScalarKit) -> MinkVector:
    return kit.vector(*SYMMETRY_WALLS[label])


def ideal_vertex_candidates(kit: ScalarKit, n: int = 4) -> tuple[MinkVector, ...]:
    """The light-like vectors sqrt2 e0 +- e_i +- e_j, 1 <= i < j <= n."""
    out = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            coords = [SQRT2] + [0] * n
            coords[i], coords[j] = si, sj
            out.append(kit.vector(*coords))
    return tuple(out)


# --- arrangement --------------------------------------------------------------

@dataclass(frozen=True)
class Arrangement:
    """Ordered labeled space-like wall vectors at one parameter value."""

    name: str
    labels: tuple[str, ...]
    vectors: tuple[MinkVector, ...]
    parameter: Parameter
    candidates: tuple[MinkVector, ...] = ()

    def __post_init__(self):
        if len(self.labels) != len(self.vectors):
            raise PreconditionError("labels and vectors differ in length")
        if len(set(self.labels)) != len(self.labels):
            dupes = sorted(label for label, c in Counter(self.labels).items() if c > 1)
            raise PreconditionError(f"duplicate wall labels: {dupes}")
        dims = {len(v) for v in self.vectors}
        if len(dims) > 1:
            raise PreconditionError("walls of different dimensions")
        for label, v in zip(self.labels, self.vectors):
            norm = mink_dot(v, v)
            if isinstance(norm, LaurentParam):
                ok = norm.positive_for_all_t()
            else:
                ok = sign_of(norm) is Sign.POSITIVE
            if not ok:
                raise PreconditionError(f"wall {label} is not space-like at t = {self.parameter}")

    @property
    def dimension(self) -> int:
        return len(self.vectors[0]) - 1

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.labels, self.vectors))

    def __contains__(self, label: str) -> bool:
        return label in self._index

    @cached_property
    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise PreconditionError(f"no wall {label} in {self.name}") from None

    def wall(self, label: str) -> MinkVector:
        return self.vectors[self.index(label)]

    def pairing(self, a: str, b: str):
        i, j = sorted((self.index(a), self.index(b)))
        return self._gram[(i, j)]

    def norm(self, label: str):
        return self.pairing(label, label)

    @cached_property
    def _gram(self) -> dict[tuple[int, int], object]:
        gram = {}
        for i, j in itertools.combinations_with_replacement(range(len(self)), 2):
            gram[(i, j)] = mink_dot(self.vectors[i], self.vectors[j])
        return gram

    def gram_matrix(self, labels=None) -> list[list]:
        labels = list(labels) if labels is not None else list(self.labels)
        return [[self.pairing(a, b) for b in labels] for a in labels]

    @cached_property
    def _relations(self) -> dict[tuple[str, str], PairRelation]:
        return {}

    def relation(self, a: str, b: str) -> PairRelation:
        key = (a, b) if self.index(a) < self.index(b) else (b, a)
        if key not in self._relations:
            self._relations[key] = pair_relation(self.wall(key[0]), self.wall(key[1]))
        return self._relations[key]

    def subset(self, labels, name: str | None = None) -> Arrangement:
        labels = [label for label in self.labels if label in set(labels)]
        return Arrangement(name or f"{self.name}[{','.join(labels)}]", tuple(labels),
                           tuple(self.wall(label) for label in labels), self.parameter, self.candidates)

    def without(self, labels) -> Arrangement:
        drop = set(labels)
        return self.subset([label for label in self.labels if label not in drop])

    def at(self, parameter: Parameter) -> Arrangement:
        """The same built-in arrangement at another parameter value."""
        if self.name not in BUILTINS:
            raise PreconditionError(f"{self.name} is not a built-in family and cannot be re-specialized")
        return builtin(self.name, parameter)

    def reparametrized_inverse(self) -> Arrangement:
        """The arrangement with t replaced by 1/t."""
        if self.parameter.is_formal:
            flip = [v.map(lambda c: c.substitute_inverse()) for v in self.vectors]
            return Arrangement(f"{self.name}(1/t)", self.labels, tuple(flip), self.parameter, self.candidates)
        return self.at(self.parameter.inverse())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "parameter": self.parameter.to_json(),
            "walls": [{"label": label, "coords": v.to_json()} for label, v in self],
            "candidates": [v.to_json() for v in self.candidates],
        }

    @classmethod
    def from_json(cls, data: dict) -> Arrangement:
        if "arrangement" in data:
            data = data["arrangement"]
        try:
            parameter = Parameter.from_json(data.get("parameter", {"kind": "exact", "t_squared": "1"}))
            labels = tuple(str(w["label"]) for w in data["walls"])
            vectors = tuple(MinkVector.from_json(w["coords"]) for w in data["walls"])
            candidates = tuple(MinkVector.from_json(c) for c in data.get("candidates", []))
        except (KeyError, TypeError) as exc:
            raise LiteralError(f"malformed arrangement file: {exc}") from exc
        if "dimension" in data and vectors and len(vectors[0]) != int(data["dimension"]) + 1:
            raise LiteralError("declared dimension does not match the wall coordinates")
        return cls(str(data.get("name", "file")), labels, vectors, parameter, candidates)


# --- built-ins ----------------------------------------------------------------

def _require_exact_value(name: str, parameter: Parameter, t_squared: FieldElem) -> None:
    if parameter.kind is ParameterKind.EXACT and parameter.t_squared == t_squared:
        return
    if parameter.kind is ParameterKind.FLOAT and abs(parameter.t_value ** 2 - float(t_squared)) < 1e-12:
        return
    raise PreconditionError(f"{name} is only defined at t^2 = {t_squared}, got {parameter}")


def _family22(parameter: Parameter, name: str = "Family22") -> Arrangement:
    kit = parameter.kit
    labels = NUMBERED + LETTERS_22
    vectors = tuple(numbered_wall(label, kit) for label in NUMBERED) + tuple(
        letter_wall(label, kit) for label in LETTERS_22)
    return Arrangement(name, labels, vectors, parameter, ideal_vertex_candidates(kit))


def _p24(parameter: Parameter) -> Arrangement:
    _require_exact_value("P24", parameter, ONE)
    kit = parameter.kit
    letters = tuple(LETTER_AXES)
    labels = NUMBERED + letters
    vectors = tuple(numbered_wall(label, kit) for label in NUMBERED) + tuple(
        letter_wall(label, kit) for label in letters)
    return Arrangement("P24", labels, vectors, parameter, ideal_vertex_candidates(kit))


def _gamma22(parameter: Parameter) -> Arrangement:
    _require_exact_value("Gamma22", parameter, ONE)
    return _family22(parameter, name="Gamma22")


def _extended(parameter: Parameter) -> Arrangement:
    kit = parameter.kit
    vectors = []
    for label in EXTENDED_LABELS:
        if label in SYMMETRY_WALLS:
            vectors.append(symmetry_wall(label, kit))
        elif label in LETTER_AXES:
            vectors.append(letter_wall(label, kit))
        else:
            vectors.append(numbered_wall(label, kit))
    return Arrangement("ExtendedGenerators", EXTENDED_LABELS, tuple(vectors), parameter,
                       ideal_vertex_candidates(kit))


def _l6(parameter: Parameter) -> Arrangement:
    _require_exact_value("L6", parameter, FieldElem(Fraction(3, 5)))
    base = _extended(parameter)
    kit = parameter.kit
    # G, H = (1, 0, 0, 0, -+sqrt(6/5)) with sqrt(6/5) = sqrt2 * t
    g = kit.vector(1, 0, 0, 0, kit.sqrt2 * kit.t)
    h = kit.vector(1, 0, 0, 0, -(kit.sqrt2 * kit.t))
    return Arrangement("L6", base.labels + ("G", "H"), base.vectors + (g, h), parameter, base.candidates)


def _cuboctahedron(parameter: Parameter) -> Arrangement:
    """Letters A-F and the eight negative walls, restricted to the hyperplane x4 = 0."""
    kit = Parameter.exact(1).kit
    labels, vectors = [], []
    for label in LETTERS_22:
        labels.append(label)
        vectors.append(MinkVector(letter_wall(label, kit).coords[:4]))
    for label in NEGATIVE_SIGNS:
        labels.append(label)
        s1, s2, s3, _ = NEGATIVE_SIGNS[label]
        vectors.append(kit.vector(SQRT2, s1, s2, s3))
    return Arrangement("Cuboctahedron", tuple(labels), tuple(vectors), Parameter.exact(1),
                       ideal_vertex_candidates(kit, n=3))


BUILTINS = {
    "P24": (_p24, lambda: Parameter.exact(1)),
    "Gamma22": (_gamma22, lambda: Parameter.exact(1)),
    "Family22": (_family22, Parameter.formal),
    "ExtendedGenerators": (_extended, Parameter.formal),
    "L6": (_l6, lambda: Parameter.exact(Fraction(3, 5))),
    "Cuboctahedron": (_cuboctahedron, lambda: Parameter.exact(1)),
}
ALIASES = {
    "p24": "P24", "gamma22": "Gamma22", "family22": "Family22", "extended": "ExtendedGenerators",
    "extendedgenerators": "ExtendedGenerators", "l6": "L6", "cuboctahedron": "Cuboctahedron",
}


def builtin(name: str, parameter: Parameter | None = None) -> Arrangement:
    canonical = ALIASES.get(name.lower(), name)
    if canonical not in BUILTINS:
        raise PreconditionError(f"unknown arrangement {name!r}; choose from {sorted(ALIASES)}")
    build, default = BUILTINS[canonical]
    return build(parameter if parameter is not None else default())


def t_for_n(n: int, exact: bool = True):
    """
    Parameter value with nu(t_n) = n: t^2 = cos^2(pi/n) / (2 - cos^2(pi/n)).

    Args:
        n: integer >= 3
        exact: return t^2 in F (only when cos^2(pi/n) lies in F) instead of a float

    Returns:
        FieldElem or float t^2
    """
    if n < 3:
        raise PreconditionError(f"n must be at least 3, got {n}")
    if not exact:
        c = math.cos(math.pi / n) ** 2
        return c / (2 - c)
    if n not in PI_OVER_COS_SQ:
        exact_ns = sorted(k for k in PI_OVER_COS_SQ if k >= 3)
        raise PreconditionError(f"cos^2(pi/{n}) is not in Q(sqrt2, sqrt5); exact mode supports n in "
                                f"{exact_ns}, use float mode otherwise")
    c = PI_OVER_COS_SQ[n]
    return c / (2 - c)


def theta_cos(t_squared):
    return (3 * t_squared - 1) / (1 + t_squared)


def ell_cosh(t_squared):
    return (3 - t_squared) / (1 + t_squared)


def nu_cos_sq(t_squared):
    """cos^2 of the angle on the two nu-labeled edges of the extended diagram."""
    return 2 * t_squared / (1 + t_squared)


def nu_of_t(t: float) -> float:
    return math.pi / math.acos(math.sqrt(2 * t * t / (1 + t * t)))


# --- relations and diagrams -----------------------------------------------------

@dataclass(frozen=True)
class RelationMatrix:
    labels: tuple[str, ...]
    relations: dict

    def get(self, a: str, b: str) -> PairRelation:
        return self.relations[(a, b)] if (a, b) in self.relations else self.relations[(b, a)]

    def pairs(self, kind: RelationKind, k: int | None = None) -> list[tuple[str, str]]:
        return [pair for pair, rel in self.relations.items()
                if rel.kind is kind and (k is None or rel.k == k)]

    def counts(self) -> Counter:
        return Counter(rel.code for rel in self.relations.values())

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame("-", index=list(self.labels), columns=list(self.labels))
        for (a, b), rel in self.relations.items():
            frame.loc[a, b] = rel.code
            frame.loc[b, a] = rel.code
        return frame

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": dict(sorted(self.counts().items())),
            "pairs": [{"walls": [a, b], **rel.to_json()} for (a, b), rel in self.relations.items()],
        }


def relation_matrix(arr: Arrangement) -> RelationMatrix:
    if arr.parameter.is_formal:
        raise PreconditionError("relation matrix needs an exact or float parameter")
    relations = {}
    for a, b in itertools.combinations(arr.labels, 2):
        relations[(a, b)] = arr.relation(a, b)
    matrix = RelationMatrix(arr.labels, relations)
    logger.info("%s at t = %s: %s", arr.name, arr.parameter, dict(matrix.counts()))
    return matrix


class EdgeKind(Enum):
    ANGLE = "angle"
    GENERIC = "generic"
    TANGENT = "tangent"
    ULTRAPARALLEL = "ultraparallel"
    DIVERGING = "diverging"


_EDGE_OF = {
    RelationKind.ANGLE_PI_OVER: EdgeKind.ANGLE,
    RelationKind.GENERIC_ANGLE: EdgeKind.GENERIC,
    RelationKind.TANGENT_AT_INFINITY: EdgeKind.TANGENT,
    RelationKind.ULTRAPARALLEL: EdgeKind.ULTRAPARALLEL,
    RelationKind.DIVERGING: EdgeKind.DIVERGING,
}


@dataclass(frozen=True)
class CoxeterDiagram:
    """Walls as nodes; one edge per non-orthogonal pair."""

    graph: nx.Graph
    flagged: tuple[tuple[str, str], ...] = ()

    def edges(self, kind: EdgeKind | None = None) -> list[tuple[str, str]]:
        return [(a, b) for a, b, data in self.graph.edges(data=True) if kind is None or data["kind"] is kind]

    def label(self, a: str, b: str) -> str:
        data = self.graph.edges[a, b]
        if data["kind"] is EdgeKind.ANGLE:
            return str(data["m"])
        if data["kind"] is EdgeKind.ULTRAPARALLEL:
            return f"cosh={data['weight']:.6f}"
        return data["kind"].value

    def edge_multiset(self) -> Counter:
        return Counter(self.label(a, b) for a, b in self.graph.edges)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.graph.nodes),
            "edges": [{"walls": [a, b], "label": self.label(a, b)} for a, b in self.graph.edges],
            "flagged": [list(pair) for pair in self.flagged],
        }


def coxeter_diagram(arr: Arrangement, reflective: bool = False) -> CoxeterDiagram:
    matrix = relation_matrix(arr)
    graph = nx.Graph()
    graph.add_nodes_from(arr.labels)
    flagged = []
    for (a, b), rel in matrix.relations.items():
        if rel.kind is RelationKind.ORTHOGONAL:
            continue
        kind = _EDGE_OF[rel.kind]
        attrs = {"kind": kind, "relation": rel}
        if kind is EdgeKind.ANGLE:
            attrs["m"] = rel.k
        elif kind is EdgeKind.ULTRAPARALLEL:
            attrs["weight"] = rel.c
        elif kind is EdgeKind.GENERIC:
            flagged.append((a, b))
        graph.add_edge(a, b, **attrs)
    if reflective and flagged:
        logger.warning("%s claimed reflective but has generic angles at %s", arr.name, flagged)
    return CoxeterDiagram(graph, tuple(flagged))


# --- ideal vertices -------------------------------------------------------------

@dataclass(frozen=True)
class IdealVertexRecord:
    vertex: MinkVector
    incident: tuple[str, ...]
    cusp_rank: int

    def to_json(self) -> dict:
        return {"vertex": self.vertex.to_json(), "incident": list(self.incident), "cusp_rank": self.cusp_rank}


def ideal_vertices(arr: Arrangement, candidates=None) -> list[IdealVertexRecord]:
    candidates = tuple(candidates) if candidates is not None else arr.candidates
    if not candidates:
        raise PreconditionError(f"{arr.name} has no candidate vertex list; pass candidates explicitly")
    records = []
    for vertex in candidates:
        if classify_vector(vertex) is not VectorKind.LIGHT_LIKE:
            logger.debug("skipping non-light-like candidate %s", vertex)
            continue
        incident = tuple(label for label, q in arr if is_zero(mink_dot(vertex, q)))
        if not incident:
            continue
        records.append(IdealVertexRecord(vertex, incident, cusp_rank(arr, incident)))
    logger.info("%s: %d ideal vertices, ranks %s", arr.name, len(records),
                dict(Counter(r.cusp_rank for r in records)))
    return records


# --- symmetries -----------------------------------------------------------------

def _identity(n: int = 4) -> list[list]:
    return [[Fraction(int(i == j)) for j in range(n + 1)] for i in range(n + 1)]


def reflection_matrix(q) -> list[list]:
    """Matrix of x -> x - 2 (x,q)/(q,q) q for a rational vector q."""
    q = [Fraction(c) for c in q]
    jq = [-q[0]] + q[1:]
    norm = sum(a * b for a, b in zip(q, jq))
    n = len(q)
    return [[Fraction(int(i == j)) - 2 * q[i] * jq[j] / norm for j in range(n)] for i in range(n)]


def l_matrix() -> list[list]:
    return reflection_matrix(SYMMETRY_WALLS["L"])


def m_matrix() -> list[list]:
    return reflection_matrix(SYMMETRY_WALLS["M"])


def n_matrix() -> list[list]:
    return reflection_matrix(SYMMETRY_WALLS["N"])


def roll_matrix() -> list[list]:
    """Negate the last two coordinates."""
    g = _identity()
    g[3][3] = g[4][4] = Fraction(-1)
    return g


def sigma_matrix() -> list[list]:
    """Negate x3; conjugates the family at t to the family at 1/t."""
    g = _identity()
    g[3][3] = Fraction(-1)
    return g


def _preserves_form(g) -> bool:
    n = len(g)
    signs = [-1] + [1] * (n - 1)
    for i in range(n):
        for j in range(n):
            value = sum(signs[k] * g[k][i] * g[k][j] for k in range(n))
            expected = signs[i] if i == j else 0
            if value != expected:
                return False
    return True


def apply_matrix(g, v: MinkVector) -> MinkVector:
    coords = []
    for row in g:
        total = None
        for entry, c in zip(row, v.coords):
            if entry == 0 or is_zero(c):
                continue
            term = c * entry
            total = term if total is None else total + term
        coords.append(total if total is not None else v.coords[0] * 0)
    return MinkVector(tuple(coords))


def _positive_multiple(image: MinkVector, target: MinkVector) -> bool:
    if not is_proportional(image, target):
        return False
    for a, b in zip(image.coords, target.coords):
        if is_zero(b):
            continue
        if isinstance(b, LaurentParam):
            if not b.is_monomial():
                continue
            return (a / b).positive_for_all_t()
        return sign_of(a / b) is Sign.POSITIVE
    return False


def verify_symmetry(arr: Arrangement, g, reparametrize: str | None = None) -> dict[str, str] | None:
    """
    Induced permutation of walls, or None when some wall image is not a wall.

    Args:
        arr: arrangement, any parameter kind
        g: (n+1)x(n+1) matrix with exact entries
        reparametrize: None, or "inverse" to compare images against the walls at 1/t

    Returns:
        dict label -> label
    """
    if len(g) != arr.dimension + 1 or not _preserves_form(g):
        raise SymmetryError("matrix does not preserve the Minkowski form")
    target = arr if reparametrize is None else arr.reparametrized_inverse()
    permutation = {}
    for label, q in arr:
        image = apply_matrix(g, q)
        match = next((other for other, w in target if _positive_multiple(image, w)), None)
        if match is None:
            logger.debug("image of %s is not a wall of %s", label, target.name)
            return None
        permutation[label] = match
    return permutation


@dataclass(frozen=True)
class SymmetryCensus:
    order: int
    integer_entries: int
    octet_preserving: int
    gh_stabilizer: int


def _rational_spatial(q: MinkVector) -> tuple[Fraction, ...]:
    """Spatial part of q rescaled to time coordinate sqrt2; rational for the 24-cell walls."""
    scale = SQRT2 / q[0]
    spatial = []
    for c in q.coords[1:]:
        value = scale * c
        if not value.is_rational:
            raise PreconditionError("wall is not rational after normalization")
        spatial.append(value.c1)
    return tuple(spatial)


def symmetry_census(arr: Arrangement, progress: bool = False) -> SymmetryCensus:
    """
    Brute-force the orthogonal maps of the spatial R^4 permuting the roots +-e_i +-e_j.

    The images of b = (e1+e2, e1-e2, e3+e4, e3-e4) run over mutually orthogonal roots;
    each candidate is accepted if it permutes the roots.
    """
    if arr.name != "P24":
        raise PreconditionError(f"symmetry census is defined for P24, got {arr.name}")
    roots = set()
    for i, j in itertools.combinations(range(4), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            r = [0, 0, 0, 0]
            r[i], r[j] = si, sj
            roots.add(tuple(Fraction(x) for x in r))
    root_set = frozenset(roots)
    roots = sorted(roots)
    basis = [(1, 1, 0, 0), (1, -1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1)]

    def dot(u, v):
        return sum(a * b for a, b in zip(u, v))

    walls = {_rational_spatial(q): label for label, q in arr}
    octets = {label: octet_of(label) for label in arr.labels}

    order = integer = octet_ok = gh_ok = 0
    tuples = [(r1,) for r1 in roots]
    for _ in range(3):
        tuples = [t + (r,) for t in tuples for r in roots if all(dot(r, s) == 0 for s in t)]
    for images in tqdm(tuples, desc="Symmetries", disable=not progress):
        # g = [images] * B^-1, B^-1 = B^T / 2
        g = [[sum(images[k][i] * basis[k][j] for k in range(4)) / 2 for j in range(4)] for i in range(4)]

        def act(v):
            return tuple(sum(g[i][j] * v[j] for j in range(4)) for i in range(4))

        if any(act(r) not in root_set for r in roots):
            continue
        order += 1
        if all(entry.denominator == 1 for row in g for entry in row):
            integer += 1
        mapped = {label: walls.get(act(w)) for w, label in walls.items()}
        if any(target is None for target in mapped.values()):
            continue
        if all(octets[a] == octets[b] for a, b in mapped.items()):
            octet_ok += 1
            if {mapped.get("G"), mapped.get("H")} == {"G", "H"}:
                gh_ok += 1
    census = SymmetryCensus(order, integer, octet_ok, gh_ok)
    logger.info("symmetry census: %s", census)
    return census


def symmetry_group_order(arr: Arrangement, progress: bool = False) -> int:
    return symmetry_census(arr, progress=progress).order


def convexity_witness(arr: Arrangement, v: MinkVector) -> bool:
    """True iff (v, q) < 0 for every wall q; with a formal t, for every t > 0."""
    if classify_vector(v) is not VectorKind.TIME_LIKE or sign_of(v[0]) is not Sign.POSITIVE:
        raise PreconditionError("witness must be a future-pointing time-like vector")
    kit = arr.parameter.kit
    lifted = kit.vector(*v.coords)
    for label, q in arr:
        value = mink_dot(lifted, q)
        if isinstance(value, LaurentParam):
            negative = value.negative_for_all_t()
        else:
            negative = sign_of(value) is Sign.NEGATIVE
        if not negative:
            logger.info("witness fails on wall %s", label)
            return False
    return True
