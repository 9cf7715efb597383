"""
The sphere at infinity: the conformal chart, wall spheres and planes, slice figures
of circle arrangements, persistent cusp points and the cuboctahedron limit.

All geometry here is float; exact arrangements are evaluated at their numeric t.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")  # headless rendering to SVG
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from hyperwalls.arrangement import (  # noqa: E402
    LETTERS_22,
    NEGATIVE_SIGNS,
    POSITIVE_SIGNS,
    Arrangement,
    Parameter,
    builtin,
    ideal_vertex_candidates,
    ideal_vertices,
)
from hyperwalls.errors import DegenerateFitError, PreconditionError  # noqa: E402
from hyperwalls.minkowski import MinkVector, RelationKind, mink_dot  # noqa: E402
from hyperwalls.scalar import FieldElem, LaurentParam, is_zero  # noqa: E402

logger = logging.getLogger(__name__)

FIT_TOL = 1e-9
FAR_AWAY = 1e6
SLICE_SAMPLES = 24
VIEWPORT = (-1.0, 3.0)

# point of the light cone sent to infinity by the chart
CHART_INFINITY = np.array([math.sqrt(2.0), 1.0, 1.0, 0.0, 0.0])

_DIRECTIONS = [np.array(d, dtype=float) / np.linalg.norm(d) for d in (
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
    (1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1), (-1, -1, -1),
)]


def _mdot(u: np.ndarray, v: np.ndarray) -> float:
    return float(-u[0] * v[0] + u[1:] @ v[1:])


def _as_array(x, t: float | None = None) -> np.ndarray:
    if isinstance(x, MinkVector):
        return x.to_float(t)
    return np.asarray(x, dtype=float)


def project_point(x, t: float = 1.0) -> np.ndarray | None:
    """
    Chart of the light cone of R^(1,4) onto R^3, None for the point at infinity.

    With s = sqrt(1 + t^2) and D = sqrt2*x0 - x1 - x2:
    X = t(sqrt2*x0 - x1 - x2 - x3 - x4/t)/D, Y = (sqrt2*x0 - x1 - x2 + x3 - t*x4)/D,
    Z = (s/sqrt2)(sqrt2*x0 - 2*x1)/D.

    Args:
        x: light-like vector (MinkVector or 5 floats)
        t: chart parameter, 1 for the undeformed 24-cell

    Returns:
        np.ndarray of shape (3,) or None
    """
    x = _as_array(x)
    if x.shape != (5,):
        raise PreconditionError(f"the chart is defined on R^(1,4), got {x.shape[0]} coordinates")
    scale = float(np.abs(x).max())
    if scale == 0.0:
        raise PreconditionError("cannot project the zero vector")
    x = x / scale
    if abs(_mdot(x, x)) > 1e-8:
        raise PreconditionError(f"{x * scale} is not light-like")
    r2 = math.sqrt(2.0)
    s = math.sqrt(1.0 + t * t)
    d = r2 * x[0] - x[1] - x[2]
    if abs(d) <= 1e-12:
        return None
    return np.array([
        t * (r2 * x[0] - x[1] - x[2] - x[3] - x[4] / t) / d,
        (r2 * x[0] - x[1] - x[2] + x[3] - t * x[4]) / d,
        (s / r2) * (r2 * x[0] - 2 * x[1]) / d,
    ])


def _timelike_unit(normals: list[np.ndarray]) -> np.ndarray:
    """Unit time-like vector orthogonal to ``normals``, closest to e0."""
    e0 = np.zeros(len(normals[0]))
    e0[0] = 1.0
    gram = np.array([[_mdot(a, b) for b in normals] for a in normals])
    rhs = np.array([_mdot(e0, n) for n in normals])
    coeffs = np.linalg.solve(gram, rhs)
    u = e0 - coeffs @ np.array(normals)
    norm = _mdot(u, u)
    if norm >= -FIT_TOL:
        raise DegenerateFitError("walls do not meet inside hyperbolic space")
    return u / math.sqrt(-norm)


def _orthonormal_complement(normals: list[np.ndarray], u: np.ndarray) -> list[np.ndarray]:
    """Gram-Schmidt of e1..en against u and the normals: a space-like orthonormal basis."""
    size = len(u)
    done = []
    for n in normals:
        v = n - sum(_mdot(n, o) * o for o in done)
        done.append(v / math.sqrt(_mdot(v, v)))
    basis = []
    for k in range(1, size):
        w = np.zeros(size)
        w[k] = 1.0
        w = w + _mdot(w, u) * u
        for o in done + basis:
            w = w - _mdot(w, o) * o
        norm = _mdot(w, w)
        if norm > FIT_TOL:
            basis.append(w / math.sqrt(norm))
    return basis[: size - 1 - len(normals)]


@dataclass(frozen=True)
class BoundarySphere:
    """A wall at infinity: a round sphere, or a plane n.p = offset when it passes through infinity."""

    label: str
    kind: str
    center: tuple | None = None
    radius: float | None = None
    normal: tuple | None = None
    offset: float | None = None
    residual: float = 0.0

    @property
    def is_plane(self) -> bool:
        return self.kind == "plane"

    def to_json(self) -> dict:
        if self.is_plane:
            return {"label": self.label, "kind": "plane", "normal": list(self.normal), "offset": self.offset}
        return {"label": self.label, "kind": "sphere", "center": list(self.center), "radius": self.radius}


def _fit_plane(points: np.ndarray) -> tuple[np.ndarray, float, float]:
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid)
    normal = vt[-1]
    if normal[np.argmax(np.abs(normal))] < 0:
        normal = -normal
    offset = float(normal @ centroid)
    residual = float(np.abs(points @ normal - offset).max())
    return normal, offset, residual


def _fit_sphere(points: np.ndarray) -> tuple[np.ndarray, float, float]:
    """|p|^2 = 2 c.p + k, k = r^2 - |c|^2, solved by least squares."""
    a = np.hstack([2 * points, np.ones((len(points), 1))])
    b = (points ** 2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    center, k = sol[:-1], sol[-1]
    r_sq = k + center @ center
    if r_sq <= 0:
        raise DegenerateFitError("fitted sphere has non-positive squared radius")
    radius = math.sqrt(r_sq)
    residual = float(np.abs(np.linalg.norm(points - center, axis=1) - radius).max())
    return center, radius, residual


def _wall_vector(arr: Arrangement, label: str) -> np.ndarray:
    if arr.parameter.is_formal:
        raise PreconditionError("boundary spheres need an exact or float parameter")
    if arr.dimension != 4:
        raise PreconditionError(f"the chart is defined for walls in R^(1,4), {arr.name} lives in R^(1,{arr.dimension})")
    return arr.wall(label).to_float()


def wall_sphere(arr: Arrangement, label: str, chart_t: float | None = None) -> BoundarySphere:
    """
    Sphere or plane of a wall at infinity, by projecting light-like samples of q-perp.

    Args:
        arr: arrangement at an exact or float parameter
        label: wall
        chart_t: chart parameter; defaults to the arrangement's t

    Returns:
        BoundarySphere
    """
    q = _wall_vector(arr, label)
    t = chart_t if chart_t is not None else arr.parameter.t_float
    u = _timelike_unit([q])
    basis = _orthonormal_complement([q], u)
    points = []
    for d in _DIRECTIONS:
        x = u + sum(c * w for c, w in zip(d, basis))
        p = project_point(x, t)
        if p is None or np.abs(p).max() > FAR_AWAY:
            logger.debug("sample of %s skipped: too close to infinity", label)
            continue
        points.append(p)
    points = np.array(points)
    if len(points) < 5:
        raise DegenerateFitError(f"too few finite samples for wall {label}")
    scale = max(1.0, float(np.abs(points).max()))
    if abs(_mdot(q, CHART_INFINITY)) <= FIT_TOL * np.abs(q).max():
        normal, offset, residual = _fit_plane(points)
        if residual > FIT_TOL * scale:
            raise DegenerateFitError(f"plane fit for {label} has residual {residual:.3e}")
        return BoundarySphere(label, "plane", normal=tuple(normal), offset=offset, residual=residual)
    center, radius, residual = _fit_sphere(points)
    if residual > FIT_TOL * scale:
        raise DegenerateFitError(f"sphere fit for {label} has residual {residual:.3e}")
    return BoundarySphere(label, "sphere", center=tuple(center), radius=radius, residual=residual)


def sphere_table(arr: Arrangement, chart_t: float | None = None) -> list[BoundarySphere]:
    return [wall_sphere(arr, label, chart_t) for label in arr.labels]


def sphere_angle_cos(a: BoundarySphere, b: BoundarySphere) -> float:
    """Cosine of the Euclidean angle between two spheres or planes (up to orientation)."""
    if a.is_plane and b.is_plane:
        return float(np.dot(a.normal, b.normal))
    if a.is_plane:
        a, b = b, a
    if b.is_plane:
        return float((np.dot(b.normal, a.center) - b.offset) / a.radius)
    d_sq = float(np.sum((np.array(a.center) - np.array(b.center)) ** 2))
    return (a.radius ** 2 + b.radius ** 2 - d_sq) / (2 * a.radius * b.radius)


# --- slices -------------------------------------------------------------------

@dataclass(frozen=True)
class SliceCurve:
    label: str
    kind: str
    code: str
    angle_degrees: float
    center: tuple | None = None
    radius: float | None = None
    point: tuple | None = None
    direction: tuple | None = None

    @property
    def color(self) -> str:
        return "black" if self.code == RelationKind.ORTHOGONAL.value else "brown"

    def to_json(self) -> dict:
        data = {"label": self.label, "kind": self.kind, "code": self.code, "angle_degrees": self.angle_degrees}
        if self.kind == "circle":
            data.update(center=list(self.center), radius=self.radius)
        else:
            data.update(point=list(self.point), direction=list(self.direction))
        return data


@dataclass(frozen=True)
class SliceFigure:
    base: str
    t: float
    curves: tuple[SliceCurve, ...]
    tangency_points: tuple = field(default_factory=tuple)
    crossing_points: tuple = field(default_factory=tuple)

    def curve(self, label: str) -> SliceCurve:
        return next(c for c in self.curves if c.label == label)

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "t": self.t,
            "curves": [c.to_json() for c in self.curves],
            "tangency_points": [{"walls": list(w), "point": list(p)} for w, p in self.tangency_points],
            "crossing_points": [{"walls": list(w), "point": list(p)} for w, p in self.crossing_points],
        }


class _BaseChart:
    """Two-dimensional coordinates on the boundary of one wall."""

    def __init__(self, base: BoundarySphere, q: np.ndarray, t: float):
        self.t = t
        if base.is_plane:
            normal = np.array(base.normal)
            axis = int(np.argmax(np.abs(normal)))
            if abs(abs(normal[axis]) - 1.0) < 1e-9:
                self.frame = np.eye(3)[[k for k in range(3) if k != axis]]
            else:
                b1 = np.cross(normal, np.eye(3)[(axis + 1) % 3])
                b1 /= np.linalg.norm(b1)
                self.frame = np.array([b1, np.cross(normal, b1)])
            self.infinity = CHART_INFINITY
            self._stereo = None
        else:
            # a chart of q-perp sending one of its ideal points to infinity
            u = _timelike_unit([q])
            w0, w1, w2 = _orthonormal_complement([q], u)
            self.infinity = u + w0
            self._stereo = (u + w0, w1, w2)

    def __call__(self, x: np.ndarray) -> np.ndarray | None:
        if self._stereo is None:
            p = project_point(x, self.t)
            return None if p is None else self.frame @ p
        far, w1, w2 = self._stereo
        denom = -_mdot(x, far)
        if abs(denom) <= 1e-12 * np.abs(x).max():
            return None
        return np.array([_mdot(x, w1), _mdot(x, w2)]) / denom


def _fit_circle_2d(points: np.ndarray) -> tuple[np.ndarray, float]:
    a = np.hstack([2 * points, np.ones((len(points), 1))])
    b = (points ** 2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    center = sol[:2]
    return center, math.sqrt(sol[2] + center @ center)


def _fit_line_2d(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid)
    direction = vt[0]
    # closest point to the origin
    point = centroid - (centroid @ direction) * direction
    return point, direction


def _light_points(normals: list[np.ndarray]) -> tuple[str, list[np.ndarray]]:
    """Light-like directions in the common orthogonal of three walls: crossing, tangency or none."""
    m = np.array([[-n[0], *n[1:]] for n in normals])
    _, s, vt = np.linalg.svd(m)
    if s[-1] <= FIT_TOL * s[0]:
        return "none", []
    null = vt[len(normals):]
    gram = np.array([[_mdot(a, b) for b in null] for a in null])
    values, vectors = np.linalg.eigh(gram)
    if values[0] < -FIT_TOL and values[1] > FIT_TOL:
        a = vectors[:, 0] / math.sqrt(-values[0])
        b = vectors[:, 1] / math.sqrt(values[1])
        return "crossing", [(a + b) @ null, (a - b) @ null]
    if abs(values[0]) <= FIT_TOL and values[1] > FIT_TOL:
        return "tangency", [vectors[:, 0] @ null]
    return "none", []


def slice_figure(arr: Arrangement, base: str, chart_t: float | None = None) -> SliceFigure:
    """
    Curves cut on the boundary of ``base`` by the walls that intersect it.

    Args:
        arr: arrangement at an exact or float parameter in R^(1,4)
        base: wall to slice along
        chart_t: chart parameter; defaults to the arrangement's t

    Returns:
        SliceFigure
    """
    t = chart_t if chart_t is not None else arr.parameter.t_float
    qb = _wall_vector(arr, base)
    chart = _BaseChart(wall_sphere(arr, base, t), qb, t)
    angles = np.linspace(0.0, 2 * math.pi, SLICE_SAMPLES, endpoint=False)

    curves = []
    for label in arr.labels:
        if label == base:
            continue
        rel = arr.relation(base, label)
        if not rel.intersecting:
            continue
        qw = _wall_vector(arr, label)
        u = _timelike_unit([qb, qw])
        w1, w2 = _orthonormal_complement([qb, qw], u)
        points = []
        for phi in angles:
            p = chart(u + math.cos(phi) * w1 + math.sin(phi) * w2)
            if p is not None and np.abs(p).max() < FAR_AWAY:
                points.append(p)
        points = np.array(points)
        through_infinity = abs(_mdot(qw, chart.infinity)) <= FIT_TOL * np.abs(qw).max() * np.abs(chart.infinity).max()
        if through_infinity:
            point, direction = _fit_line_2d(points)
            curves.append(SliceCurve(label, "line", rel.code, rel.angle_degrees,
                                     point=tuple(point), direction=tuple(direction)))
        else:
            center, radius = _fit_circle_2d(points)
            curves.append(SliceCurve(label, "circle", rel.code, rel.angle_degrees,
                                     center=tuple(center), radius=radius))

    tangencies, crossings = [], []
    labels = [c.label for c in curves]
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            kind, lights = _light_points([qb, _wall_vector(arr, a), _wall_vector(arr, b)])
            for x in lights:
                p = chart(x)
                if p is None:
                    continue
                if kind == "tangency":
                    tangencies.append(((a, b), tuple(p)))
                else:
                    crossings.append(((a, b), tuple(p)))
    logger.info("slice along %s at t = %.4f: %d curves, %d tangencies, %d crossings",
                base, t, len(curves), len(tangencies), len(crossings))
    return SliceFigure(base, t, tuple(curves), tuple(tangencies), tuple(crossings))


def render_slice_svg(figure: SliceFigure, path, viewport: tuple[float, float] = VIEWPORT) -> None:
    """Write the slice as SVG: pi/2 curves black, other angles brown, tangency points gray."""
    with plt.rc_context({"svg.hashsalt": "hyperwalls"}):
        fig, ax = plt.subplots(figsize=(6, 6))
        for curve in figure.curves:
            if curve.kind == "circle":
                ax.add_patch(Circle(curve.center, curve.radius, fill=False, edgecolor=curve.color, linewidth=1.2))
                anchor = np.array(curve.center) + curve.radius * np.array([0.7071, 0.7071])
            else:
                point = np.array(curve.point)
                ax.axline(tuple(point), xy2=tuple(point + np.array(curve.direction)), color=curve.color,
                          linewidth=1.2)
                anchor = point
            ax.annotate(curve.label, tuple(anchor), fontsize=8, color=curve.color)
        if figure.tangency_points:
            pts = np.array([p for _, p in figure.tangency_points])
            ax.scatter(pts[:, 0], pts[:, 1], s=12, color="gray", zorder=3)
        if figure.crossing_points:
            pts = np.array([p for _, p in figure.crossing_points])
            ax.scatter(pts[:, 0], pts[:, 1], s=6, color="black", zorder=3)
        ax.set_xlim(*viewport)
        ax.set_ylim(*viewport)
        ax.set_aspect("equal")
        ax.set_title(f"Slice along {figure.base} at t = {figure.t:.4f}")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info("slice figure written to %s", path)


# --- cusps and the limit ---------------------------------------------------------

@dataclass(frozen=True)
class PersistentCusp:
    vertex: MinkVector
    incident: tuple[str, ...]
    point: tuple | None

    def to_json(self) -> dict:
        return {"vertex": self.vertex.to_json(), "incident": list(self.incident),
                "point": list(self.point) if self.point is not None else None}


def persistent_cusps(arr: Arrangement) -> list[PersistentCusp]:
    """Rank-3 ideal vertices of the family, placed in the fixed chart at t = 1."""
    out = []
    for record in ideal_vertices(arr):
        if record.cusp_rank != 3:
            continue
        p = project_point(record.vertex.to_float(), 1.0)
        out.append(PersistentCusp(record.vertex, record.incident, None if p is None else tuple(p)))
    return out


def _value_at_zero(c) -> FieldElem:
    if isinstance(c, LaurentParam):
        if any(exp < 0 for exp in c.terms):
            raise PreconditionError(f"{c!r} has no limit at t = 0")
        return c.coefficient(0)
    return c


def cuboctahedron_limit() -> Arrangement:
    """
    Limit of the family as t -> 0, restricted to the hyperplane e4-perp.

    Positive walls rescaled by t tend to +-e4; letters and negatives become orthogonal
    to e4 and form a right-angled ideal cuboctahedron in R^(1,3).
    """
    family = builtin("Family22")
    kit = family.parameter.kit
    e4 = MinkVector((0, 0, 0, 0, 1))
    for label in POSITIVE_SIGNS:
        limit = family.wall(label).scale(kit.t).map(_value_at_zero)
        if not (limit - MinkVector((0, 0, 0, 0, limit[4]))).is_zero():
            raise PreconditionError(f"rescaled wall {label} does not tend to a multiple of e4")
    labels, vectors = [], []
    for label in LETTERS_22 + tuple(NEGATIVE_SIGNS):
        limit = family.wall(label).map(_value_at_zero)
        if not is_zero(mink_dot(limit, e4.map(FieldElem))):
            raise PreconditionError(f"limit of wall {label} is not orthogonal to e4")
        labels.append(label)
        vectors.append(MinkVector(limit.coords[:4]))
    kit3 = Parameter.exact(1).kit
    arr = Arrangement("Cuboctahedron", tuple(labels), tuple(vectors), Parameter.exact(1),
                      ideal_vertex_candidates(kit3, n=3))
    logger.info("cuboctahedron limit: %d walls", len(arr))
    return arr
