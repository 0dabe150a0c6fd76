"""Shared geometric and measure vocabulary: spaces, gauges, shapes, domains.

Everything here is immutable after construction and safe to share across
parallel workers.  Membership predicates are pure and vectorized: they accept
an ``(m, dim)`` array of chart points and return a boolean mask.

Conventions
-----------
* ``generator_scale="dirichlet_form"`` means the generator is normalized from
  the energy form ``E(f,f) = integral |grad f|^2`` (the full Laplacian /
  sub-Laplacian).  ``"probabilist"`` halves it, matching the transition
  semigroup of standard Brownian motion.  Switching scale multiplies every
  assembled operator, hence every eigenvalue, by exactly 2.
* On ``heisenberg3`` the chart is the global exponential chart (x, y, z) with
  group law ``(x1,y1,z1)*(x2,y2,z2) = (x1+x2, y1+y2, z1+z2+(x1 y2-x2 y1)/2)``.
* On ``su2_chart`` the chart is cylindrical (rho, theta, z), normalized so
  that the standard rescaled-operator coefficient family (cot/tan forms with
  volume density sin(2 rho)/2) is exact in these coordinates.  Group elements
  are represented internally as unit quaternions; the chart angles are half
  the bare quaternion angles, and the sub-Laplacian of the unit-quaternion
  generators equals one quarter of the operator written in this chart.
* The flat-group cylindrical chart (the contraction limit) uses the same
  normalization: its z coordinate is twice the exponential-chart z of
  ``heisenberg3``, so the chart-radius gauge (rho^4 + 4 z^2)^(1/4) cuts out
  exactly the Koranyi ball ((x^2+y^2)^2 + 16 z^2)^(1/4) of ``heisenberg3``.
* Carnot-Caratheodory balls are replaced everywhere by homogeneous-gauge
  balls (Koranyi gauge on heisenberg3, chart-radius gauge on su2_chart).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DIRICHLET_FORM = "dirichlet_form"
PROBABILIST = "probabilist"
_SCALES = (DIRICHLET_FORM, PROBABILIST)

_SPACE_KINDS = ("euclidean", "heisenberg3", "su2_chart", "gasket")


class DomainError(ValueError):
    """A requested domain cannot be constructed (empty interior, bad shape)."""


class UnsupportedError(NotImplementedError):
    """Operation not available for this space, gauge, or process."""


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class SpaceModel:
    """A metric measure space model plus the generator normalization."""

    kind: str
    n: int = 0  # dimension for euclidean, refinement level for gasket
    generator_scale: str = DIRICHLET_FORM

    def __post_init__(self) -> None:
        if self.kind not in _SPACE_KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.generator_scale not in _SCALES:
            raise ValueError(f"unknown generator_scale {self.generator_scale!r}")
        if self.kind == "euclidean" and self.n < 1:
            raise ValueError("euclidean dimension must be >= 1")
        if self.kind == "gasket" and self.n < 0:
            raise ValueError("gasket level must be >= 0")

    @property
    def dim(self) -> int:
        """Chart dimension (2 for the planar gasket embedding)."""
        if self.kind == "euclidean":
            return self.n
        if self.kind == "gasket":
            return 2
        return 3

    @property
    def scale_factor(self) -> float:
        """Operator multiplier: 1 for the form normalization, 1/2 otherwise."""
        return 1.0 if self.generator_scale == DIRICHLET_FORM else 0.5


def euclidean(n: int, generator_scale: str = DIRICHLET_FORM) -> SpaceModel:
    return SpaceModel("euclidean", n, generator_scale)


def heisenberg3(generator_scale: str = DIRICHLET_FORM) -> SpaceModel:
    return SpaceModel("heisenberg3", 3, generator_scale)


def su2_chart(generator_scale: str = DIRICHLET_FORM) -> SpaceModel:
    return SpaceModel("su2_chart", 3, generator_scale)


def gasket(level: int, generator_scale: str = DIRICHLET_FORM) -> SpaceModel:
    return SpaceModel("gasket", level, generator_scale)


# ---------------------------------------------------------------------------
# group operations


def heis_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Heisenberg group product, vectorized over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.empty(np.broadcast_shapes(p.shape, q.shape), dtype=float)
    out[..., 0] = p[..., 0] + q[..., 0]
    out[..., 1] = p[..., 1] + q[..., 1]
    out[..., 2] = (
        p[..., 2]
        + q[..., 2]
        + 0.5 * (p[..., 0] * q[..., 1] - q[..., 0] * p[..., 1])
    )
    return out


def heis_inv(p: np.ndarray) -> np.ndarray:
    return -np.asarray(p, dtype=float)


def heis_dilate(r: float, p: np.ndarray) -> np.ndarray:
    """Anisotropic dilation (x,y,z) -> (rx, ry, r^2 z)."""
    p = np.asarray(p, dtype=float)
    out = p.copy()
    out[..., 0] *= r
    out[..., 1] *= r
    out[..., 2] *= r * r
    return out


# Unit quaternions (a, b, c, d) realize the matrix group: the basis elements
# i, j, k are twice the Milnor generators X, Y, Z, so the quaternion product
# reproduces the matrix product and |q|^2 is the determinant.


def quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    a2, b2, c2, d2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    out = np.empty(np.broadcast_shapes(p.shape, q.shape), dtype=float)
    out[..., 0] = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2
    out[..., 1] = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2
    out[..., 2] = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2
    out[..., 3] = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2
    return out


def quat_conj(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    out = q.copy()
    out[..., 1:] *= -1.0
    return out


def su2_from_chart(pts: np.ndarray) -> np.ndarray:
    """Cylindrical chart (rho, theta, z) -> unit quaternion.

    The chart angles are half the bare quaternion angles: the quaternion at
    (rho, theta, z) is built from (2 rho, theta, 2 z) in the classical
    product parametrization, which is the normalization in which the
    rescaled-operator coefficient family is exact.  Valid for rho < pi/2.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    rho, theta, z = pts[..., 0], pts[..., 1], pts[..., 2]
    out = np.empty(pts.shape[:-1] + (4,), dtype=float)
    out[..., 0] = np.cos(rho) * np.cos(z)
    out[..., 1] = np.sin(rho) * np.cos(theta - z)
    out[..., 2] = np.sin(rho) * np.sin(theta - z)
    out[..., 3] = np.cos(rho) * np.sin(z)
    return out


def su2_to_chart(q: np.ndarray) -> np.ndarray:
    """Unit quaternion -> cylindrical chart triple, valid for rho < pi/2."""
    q = np.asarray(q, dtype=float)
    a, b, c, d = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    rho = np.arctan2(np.hypot(b, c), np.hypot(a, d))
    z = np.arctan2(d, a)
    theta = np.arctan2(c, b) + z
    out = np.empty(q.shape[:-1] + (3,), dtype=float)
    out[..., 0] = rho
    out[..., 1] = theta
    out[..., 2] = z
    return out


# ---------------------------------------------------------------------------
# gauges

_GAUGE_KINDS = ("euclidean_norm", "koranyi", "chart_radius")


@dataclass(frozen=True)
class Gauge:
    """Homogeneous quasi-norm.  ``value`` is 1-homogeneous under the
    matching dilation; ``scale`` divides the raw gauge, so a ball of radius
    r in a gauge with scale s is the raw-gauge ball of radius r*s."""

    kind: str
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _GAUGE_KINDS:
            raise ValueError(f"unknown gauge kind {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("gauge scale must be positive")

    def value(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "euclidean_norm":
            v = np.sqrt(np.sum(pts * pts, axis=-1))
        elif self.kind == "koranyi":
            x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
            v = ((x * x + y * y) ** 2 + 16.0 * z * z) ** 0.25
        else:
            # chart_radius: Koranyi gauge in cylindrical-chart normalization
            # (chart z is twice the exponential z, so 16 z_e^2 = 4 z^2)
            rho, z = pts[..., 0], pts[..., 2]
            v = (rho**4 + 4.0 * z * z) ** 0.25
        return v / self.scale

    def dilate(self, r: float, pts: np.ndarray) -> np.ndarray:
        """The dilation under which this gauge is exactly 1-homogeneous."""
        pts = np.asarray(pts, dtype=float)
        if self.kind == "euclidean_norm":
            return r * pts
        out = pts.copy()
        out[..., 0] *= r
        if self.kind == "koranyi":
            out[..., 1] *= r
        out[..., 2] *= r * r
        return out


# ---------------------------------------------------------------------------
# shapes

Array = np.ndarray


class Shape:
    """Base class; subclasses provide vectorized membership and a bbox."""

    connected: bool = True

    def contains(self, pts: Array) -> Array:
        raise NotImplementedError

    def bbox(self) -> tuple[tuple[float, float], ...]:
        raise NotImplementedError

    def boundary_gaps(self, pts: Array) -> Array | None:
        """Per-face distances to the kill boundary, ``(m, F)``, or None if
        the shape has no half-space boundary model (no bridge correction)."""
        return None


@dataclass(frozen=True)
class Interval(Shape):
    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise DomainError(f"empty interval ({self.a}, {self.b})")

    def contains(self, pts: Array) -> Array:
        x = np.atleast_2d(pts)[..., 0]
        return (x > self.a) & (x < self.b)

    def bbox(self):
        return ((self.a, self.b),)

    def boundary_gaps(self, pts: Array) -> Array:
        x = np.atleast_2d(pts)[..., 0]
        return np.stack([x - self.a, self.b - x], axis=-1)


@dataclass(frozen=True)
class Box(Shape):
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi) or any(
            l >= h for l, h in zip(self.lo, self.hi)
        ):
            raise DomainError("box requires lo < hi per axis")

    def contains(self, pts: Array) -> Array:
        pts = np.atleast_2d(pts)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts > lo) & (pts < hi), axis=-1)

    def bbox(self):
        return tuple(zip(self.lo, self.hi))

    def boundary_gaps(self, pts: Array) -> Array:
        pts = np.atleast_2d(pts)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.concatenate([pts - lo, hi - pts], axis=-1)


@dataclass(frozen=True)
class GaugeBall(Shape):
    gauge: Gauge
    radius: float
    center: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise DomainError("ball radius must be positive")
        if self.center and self.gauge.kind != "euclidean_norm":
            if any(c != 0.0 for c in self.center):
                raise UnsupportedError(
                    "group gauge balls are supported only at the identity"
                )

    def _rel(self, pts: Array) -> Array:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.center:
            return pts - np.asarray(self.center)
        return pts

    def contains(self, pts: Array) -> Array:
        return self.gauge.value(self._rel(pts)) < self.radius

    def bbox(self):
        raw = self.radius * self.gauge.scale
        if self.gauge.kind == "euclidean_norm":
            c = self.center if self.center else (0.0,)
            return tuple((ci - raw, ci + raw) for ci in c)
        if self.gauge.kind == "koranyi":
            zr = raw * raw / 4.0
            return ((-raw, raw), (-raw, raw), (-zr, zr))
        # chart_radius on (rho, theta, z)
        zr = raw * raw / 2.0
        return ((0.0, raw), (0.0, 2.0 * math.pi), (-zr, zr))

    def boundary_gaps(self, pts: Array) -> Array | None:
        if self.gauge.kind != "euclidean_norm":
            return None
        rel = self._rel(pts)
        if rel.shape[-1] == 1:
            # one dimension: both endpoints matter, treat as an interval
            x = rel[..., 0]
            return np.stack([x + self.radius, self.radius - x], axis=-1)
        d = np.sqrt(np.sum(rel * rel, axis=-1))
        return (self.radius - d)[..., None]


@dataclass(frozen=True)
class Polygon(Shape):
    """Simple 2-D polygon, membership by the crossing-number rule."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise DomainError("polygon needs at least 3 vertices")

    def contains(self, pts: Array) -> Array:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x, y = pts[..., 0], pts[..., 1]
        verts = np.asarray(self.vertices, dtype=float)
        x1, y1 = verts[:, 0], verts[:, 1]
        x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
        inside = np.zeros(x.shape, dtype=bool)
        with np.errstate(divide="ignore", invalid="ignore"):
            for k in range(len(verts)):
                cond = (y1[k] > y) != (y2[k] > y)
                xin = (x2[k] - x1[k]) * (y - y1[k]) / (y2[k] - y1[k]) + x1[k]
                inside ^= cond & (x < xin)
        return inside

    def bbox(self):
        verts = np.asarray(self.vertices, dtype=float)
        return tuple(
            (float(verts[:, i].min()), float(verts[:, i].max())) for i in range(2)
        )


@dataclass(frozen=True)
class ShapeUnion(Shape):
    parts: tuple[Shape, ...]
    connected: bool = False

    def contains(self, pts: Array) -> Array:
        mask = self.parts[0].contains(pts)
        for p in self.parts[1:]:
            mask = mask | p.contains(pts)
        return mask

    def bbox(self):
        boxes = [p.bbox() for p in self.parts]
        dim = len(boxes[0])
        return tuple(
            (min(b[i][0] for b in boxes), max(b[i][1] for b in boxes))
            for i in range(dim)
        )


@dataclass(frozen=True)
class ShapeDifference(Shape):
    base: Shape
    cut: Shape
    connected: bool = False

    def contains(self, pts: Array) -> Array:
        return self.base.contains(pts) & ~self.cut.contains(pts)

    def bbox(self):
        return self.base.bbox()


@dataclass(frozen=True)
class GasketCells(Shape):
    """Subset of the gasket selected by cell-address prefixes.

    The unit gasket has corner coordinates (0,0), (1,0), (1/2, sqrt(3)/2);
    a prefix (i1,...,ik) selects the image cell under the corresponding
    corner contractions.  The empty prefix selects everything.
    """

    prefixes: tuple[tuple[int, ...], ...] = ((),)
    connected: bool = True

    _CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))

    def contains(self, pts: Array) -> Array:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        mask = np.zeros(pts.shape[0], dtype=bool)
        for prefix in self.prefixes:
            mask |= self._in_cell(pts, prefix)
        return mask

    def _in_cell(self, pts: Array, prefix: tuple[int, ...]) -> Array:
        corners = np.asarray(self._CORNERS, dtype=float)
        a, b, c = corners
        for i in prefix:
            v = corners[i]
            a, b, c = (a + v) / 2, (b + v) / 2, (c + v) / 2
        # barycentric containment with a small tolerance for corner points
        m = np.stack([b - a, c - a], axis=1)
        rel = pts - a
        uv = rel @ np.linalg.inv(m).T
        tol = 1e-12
        return (uv[:, 0] >= -tol) & (uv[:, 1] >= -tol) & (uv.sum(axis=1) <= 1 + tol)

    def bbox(self):
        return ((0.0, 1.0), (0.0, math.sqrt(3.0) / 2.0))


def union(*parts: Shape, connected: bool = False) -> ShapeUnion:
    return ShapeUnion(tuple(parts), connected=connected)


def difference(base: Shape, cut: Shape, connected: bool = False) -> ShapeDifference:
    return ShapeDifference(base, cut, connected=connected)


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Domain:
    """Open set given by a membership predicate over a chart.

    Grid nodes failing ``membership`` are cemetery nodes: every assembled
    operator drops couplings to them (zero boundary condition).
    """

    space: SpaceModel
    membership: Callable[[Array], Array] = field(repr=False)
    bounding_box: tuple[tuple[float, float], ...] = ()
    connected: bool = True
    label: str = ""
    shape: Shape | None = field(default=None, repr=False)

    def contains(self, pts: Array) -> Array:
        return self.membership(pts)


_PROBE_POINTS = 33  # coarsest supported resolution for the emptiness check


def make_domain(space: SpaceModel, shape: Shape, label: str = "") -> Domain:
    """Build a Domain, rejecting shapes with no interior grid node."""
    box = shape.bbox()
    if space.kind != "gasket" and len(box) != space.dim:
        raise DomainError(
            f"shape dimension {len(box)} does not match space dimension {space.dim}"
        )
    if space.kind == "gasket":
        if not isinstance(shape, GasketCells):
            raise DomainError("gasket domains are built from GasketCells")
        for prefix in shape.prefixes:
            if any(i not in (0, 1, 2) for i in prefix):
                raise DomainError(f"bad gasket cell address {prefix}")
    else:
        axes = [np.linspace(lo, hi, _PROBE_POINTS)[1:-1] for lo, hi in box]
        grid = np.stack(
            [g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1
        )
        if not shape.contains(grid).any():
            raise DomainError(
                f"shape {shape!r} has empty interior at the probe resolution"
            )
    return Domain(
        space=space,
        membership=shape.contains,
        bounding_box=tuple((float(lo), float(hi)) for lo, hi in box),
        connected=shape.connected,
        label=label,
        shape=shape,
    )


# ---------------------------------------------------------------------------
# chart distance


def chart_distance(space: SpaceModel, p: Sequence[float], q: Sequence[float]) -> float:
    """Distance on the chart: exact for euclidean, gauge quasi-distance
    (gauge of the group difference) on the group spaces."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if space.kind == "euclidean":
        return float(np.linalg.norm(q - p))
    if space.kind == "heisenberg3":
        gauge = Gauge("koranyi")
        return float(gauge.value(heis_mul(heis_inv(p), q)[None, :])[0])
    if space.kind == "su2_chart":
        qp = su2_from_chart(p[None, :])[0]
        qq = su2_from_chart(q[None, :])[0]
        diff = quat_mul(quat_conj(qp), qq)
        gauge = Gauge("chart_radius")
        return float(gauge.value(su2_to_chart(diff)[None, :])[0])
    raise UnsupportedError(f"chart_distance not defined for {space.kind}")
