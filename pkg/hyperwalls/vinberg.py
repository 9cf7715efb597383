"""
Gram-definiteness classification of wall subsets and the finite-volume and
arithmeticity criteria built on it.

Subsets are classified on the raw Gram matrix, which is congruent to the
normalized one, so no square roots of norms are needed.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import networkx as nx
import pandas as pd
from tqdm import tqdm

from hyperwalls.errors import NotReflectiveError, PreconditionError
from hyperwalls.linalg import determinant, is_positive_definite, leading_minors, principal_minors_nonnegative
from hyperwalls.minkowski import RelationKind, scalar_to_json
from hyperwalls.scalar import FieldElem, ParamScalar, Sign, is_zero, sign_of

if TYPE_CHECKING:
    from hyperwalls.arrangement import Arrangement

logger = logging.getLogger(__name__)


class SubdiagramKind(Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class SubdiagramClass:
    """
    Elliptic: Gram positive definite.
    Parabolic(rank): semidefinite, not definite; rank sums size - 1 over singular components.
    ``pure`` is set when every component is singular (a cusp subdiagram proper).
    """

    kind: SubdiagramKind
    rank: int = 0
    pure: bool = True

    def __str__(self) -> str:
        if self.kind is SubdiagramKind.PARABOLIC:
            return f"parabolic({self.rank})"
        return self.kind.value


ELLIPTIC = SubdiagramClass(SubdiagramKind.ELLIPTIC)
INDEFINITE = SubdiagramClass(SubdiagramKind.INDEFINITE, pure=False)


def _ordered(arr: Arrangement, subset) -> list[str]:
    wanted = set(subset)
    missing = wanted - set(arr.labels)
    if missing:
        raise PreconditionError(f"walls {sorted(missing)} are not in {arr.name}")
    return [label for label in arr.labels if label in wanted]


def _components(arr: Arrangement, labels: list[str]) -> list[list[str]]:
    graph = nx.Graph()
    graph.add_nodes_from(labels)
    for a, b in itertools.combinations(labels, 2):
        if not is_zero(arr.pairing(a, b)):
            graph.add_edge(a, b)
    order = {label: i for i, label in enumerate(labels)}
    return [sorted(comp, key=order.get) for comp in nx.connected_components(graph)]


def _component_kind(gram) -> str:
    """'definite', 'singular' (semidefinite, det 0) or 'indefinite'."""
    minors = leading_minors(gram)
    m = len(gram)
    if len(minors) == m and all(sign_of(d) is Sign.POSITIVE for d in minors[:-1]):
        last = sign_of(minors[-1])
        if last is Sign.POSITIVE:
            return "definite"
        if last is Sign.ZERO:
            return "singular"
        return "indefinite"
    # a zero or negative minor early on: fall back to the full principal-minor test
    if principal_minors_nonnegative(gram) and is_zero(determinant(gram)):
        return "singular"
    return "indefinite"


def classify_subdiagram(arr: Arrangement, subset) -> SubdiagramClass:
    if not subset:
        raise PreconditionError("empty subdiagram")
    if arr.parameter.is_formal:
        raise PreconditionError("subdiagram classification needs an exact or float parameter")
    labels = _ordered(arr, subset)
    if is_positive_definite(arr.gram_matrix(labels)):
        return ELLIPTIC
    rank, pure = 0, True
    for comp in _components(arr, labels):
        kind = _component_kind(arr.gram_matrix(comp))
        if kind == "indefinite":
            return INDEFINITE
        if kind == "definite":
            pure = False
            continue
        rank += len(comp) - 1
    return SubdiagramClass(SubdiagramKind.PARABOLIC, rank, pure)


def cusp_rank(arr: Arrangement, incident) -> int:
    """Sum of size - 1 over the singular semidefinite components of the incident walls."""
    labels = _ordered(arr, incident)
    if arr.parameter.is_formal:
        raise PreconditionError("cusp rank needs an exact or float parameter")
    rank = 0
    for comp in _components(arr, labels):
        kind = _component_kind(arr.gram_matrix(comp))
        if kind == "singular":
            rank += len(comp) - 1
        elif kind == "indefinite":
            logger.warning("walls %s through a common ideal point have an indefinite component", comp)
    return rank


# --- finite volume --------------------------------------------------------------

class VolumeStatus(Enum):
    FINITE = "FiniteVolume"
    INFINITE = "InfiniteVolume"


@dataclass(frozen=True)
class VolumeVerdict:
    status: VolumeStatus
    edges: tuple[tuple[str, ...], ...]
    finite_vertices: tuple[tuple[str, ...], ...]
    cusp_vertices: tuple[tuple[str, ...], ...]
    bad_edges: tuple[tuple[str, ...], ...]
    finite_edge_ends: int

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "edges": len(self.edges),
            "finite_edge_ends": self.finite_edge_ends,
            "finite_vertices": [list(v) for v in self.finite_vertices],
            "cusps": [list(c) for c in self.cusp_vertices],
            "bad_edges": [list(e) for e in self.bad_edges],
        }


def _meeting_pairs(arr: Arrangement) -> set[frozenset]:
    """Pairs that may sit together in an elliptic or parabolic subset: c^2 <= 1."""
    ok = set()
    for a, b in itertools.combinations(arr.labels, 2):
        rel = arr.relation(a, b)
        if rel.intersecting or rel.kind is RelationKind.TANGENT_AT_INFINITY:
            ok.add(frozenset((a, b)))
    return ok


def _candidate_subsets(arr: Arrangement, size: int, meeting: set[frozenset]):
    for subset in itertools.combinations(arr.labels, size):
        if all(frozenset(pair) in meeting for pair in itertools.combinations(subset, 2)):
            yield subset


def finite_volume_check(arr: Arrangement, allow_generic: bool = False) -> VolumeVerdict:
    """
    Audit every edge (elliptic (n-1)-subset) for two ends.

    An end is an elliptic n-subset containing the edge or a rank-(n-1) cusp subdiagram
    containing it.

    Args:
        arr: arrangement at an exact parameter
        allow_generic: skip the reflectivity precondition (for transitional parameters)

    Returns:
        VolumeVerdict
    """
    if arr.parameter.is_formal:
        raise PreconditionError("finite-volume check needs an exact parameter")
    generic = [(a, b) for a, b in itertools.combinations(arr.labels, 2)
               if arr.relation(a, b).kind is RelationKind.GENERIC_ANGLE]
    if generic and not allow_generic:
        raise NotReflectiveError(generic)
    n = arr.dimension
    meeting = _meeting_pairs(arr)

    edges = [s for s in _candidate_subsets(arr, n - 1, meeting)
             if classify_subdiagram(arr, s).kind is SubdiagramKind.ELLIPTIC]
    vertices = [s for s in _candidate_subsets(arr, n, meeting)
                if classify_subdiagram(arr, s).kind is SubdiagramKind.ELLIPTIC]
    cusps = []
    for size in range(n, 2 * (n - 1) + 1):
        for s in _candidate_subsets(arr, size, meeting):
            cls = classify_subdiagram(arr, s)
            if cls.kind is SubdiagramKind.PARABOLIC and cls.pure and cls.rank == n - 1:
                cusps.append(s)

    bad_edges = []
    finite_ends = 0
    for edge in edges:
        members = set(edge)
        finite = [v for v in vertices if members <= set(v)]
        cusped = [c for c in cusps if members <= set(c)]
        finite_ends += len(finite)
        if len(finite) + len(cusped) != 2:
            logger.debug("edge %s has %d finite and %d cusped ends", edge, len(finite), len(cusped))
            bad_edges.append(edge)

    status = VolumeStatus.INFINITE if bad_edges else VolumeStatus.FINITE
    verdict = VolumeVerdict(status, tuple(edges), tuple(vertices), tuple(cusps), tuple(bad_edges), finite_ends)
    logger.info("%s at t = %s: %s, %d edges, %d finite vertices, %d cusps, %d bad edges",
                arr.name, arr.parameter, status.value, len(edges), len(vertices), len(cusps), len(bad_edges))
    return verdict


# --- transition scan ------------------------------------------------------------

@dataclass(frozen=True)
class TransitionTable:
    rows: tuple[tuple[FieldElem, tuple[str, ...], SubdiagramClass], ...]
    changes: tuple[tuple[tuple[str, ...], FieldElem, FieldElem, SubdiagramClass, SubdiagramClass], ...]

    def classes(self, subset) -> list[SubdiagramClass]:
        key = tuple(subset)
        return [cls for _, s, cls in self.rows if s == key]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"t_squared": str(t2), "t_squared_float": float(t2), "subset": " ".join(s), "class": str(cls)}
             for t2, s, cls in self.rows]
        )


def transition_scan(family: Arrangement, watch, t_grid, progress: bool = False) -> TransitionTable:
    """Classify each watched subset at each exact t^2 of the grid and report class changes."""
    from hyperwalls.arrangement import Parameter

    watch = [tuple(s) for s in watch]
    for s in watch:
        if len(s) > family.dimension:
            raise PreconditionError(f"watched subset {s} has more than {family.dimension} walls")
    rows = []
    history: dict[tuple[str, ...], list] = {s: [] for s in watch}
    for t2 in tqdm(list(t_grid), desc="Scan", disable=not progress):
        t2 = t2 if isinstance(t2, FieldElem) else FieldElem(t2)
        arr = family.at(Parameter.exact(t2))
        for s in watch:
            cls = classify_subdiagram(arr, s)
            rows.append((t2, s, cls))
            history[s].append((t2, cls))
    changes = []
    for s, seq in history.items():
        for (t_prev, c_prev), (t_next, c_next) in zip(seq, seq[1:]):
            if c_prev != c_next:
                changes.append((s, t_prev, t_next, c_prev, c_next))
                logger.info("%s changes from %s to %s between t^2 = %s and %s", s, c_prev, c_next, t_prev, t_next)
    return TransitionTable(tuple(rows), tuple(changes))


# --- arithmeticity --------------------------------------------------------------

class ArithmeticVerdict(Enum):
    ARITHMETIC = "Arithmetic"
    NON_ARITHMETIC = "NonArithmetic"


@dataclass(frozen=True)
class ArithmeticityReport:
    edge_labels: dict
    failing_cycles: tuple
    verdict: ArithmeticVerdict
    cycles_checked: int = 0
    products: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "cycles_checked": self.cycles_checked,
            "edge_labels": [
                {"walls": list(pair), "label_squared": scalar_to_json(sq), "sign": sign.value}
                for pair, (sq, sign) in self.edge_labels.items()
            ],
            "failing_cycles": [{"cycle": list(c), "product": scalar_to_json(p)} for c, p in self.failing_cycles],
        }


def _is_rational_integer(x) -> bool:
    if isinstance(x, ParamScalar):
        return x.odd.is_zero() and x.even.is_integer
    if isinstance(x, FieldElem):
        return x.is_integer
    return float(x).is_integer()


def arithmeticity_check(arr: Arrangement) -> ArithmeticityReport:
    """
    Cycle criterion for noncompact finite-volume polytopes.

    Each edge carries -2 times the normalized pairing; every 2-cycle and every simple
    cycle of the diagram must have a rational-integer product.
    """
    verdict = finite_volume_check(arr)
    if verdict.status is not VolumeStatus.FINITE:
        raise PreconditionError(f"{arr.name} at t = {arr.parameter} does not have finite volume")
    if not verdict.cusp_vertices:
        raise PreconditionError(f"{arr.name} at t = {arr.parameter} is compact; only the cusped criterion is implemented")

    graph = nx.Graph()
    graph.add_nodes_from(arr.labels)
    edge_labels = {}
    for a, b in itertools.combinations(arr.labels, 2):
        p = arr.pairing(a, b)
        if is_zero(p):
            continue
        graph.add_edge(a, b, pairing=p)
        edge_labels[(a, b)] = (4 * p * p / (arr.norm(a) * arr.norm(b)), sign_of(-p))

    failing, products = [], {}
    checked = 0
    for (a, b), (label_sq, _) in edge_labels.items():
        checked += 1
        products[(a, b, a)] = label_sq
        if not _is_rational_integer(label_sq):
            failing.append(((a, b, a), label_sq))
    for cycle in nx.simple_cycles(graph):
        if len(cycle) < 3:
            continue
        checked += 1
        numerator, denominator = 1, 1
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            numerator = numerator * (-2 * graph.edges[a, b]["pairing"])
            denominator = denominator * arr.norm(a)
        product = numerator / denominator
        key = tuple(cycle) + (cycle[0],)
        products[key] = product
        if not _is_rational_integer(product):
            failing.append((key, product))

    result = ArithmeticVerdict.NON_ARITHMETIC if failing else ArithmeticVerdict.ARITHMETIC
    logger.info("%s at t = %s: %s (%d cycles, %d failing)", arr.name, arr.parameter, result.value, checked, len(failing))
    return ArithmeticityReport(edge_labels, tuple(failing), result, checked, products)
