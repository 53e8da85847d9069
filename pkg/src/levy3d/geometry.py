"""Torus arithmetic, canonical detectable targets, and geometric descriptors.

The search domain is the cubic torus ``[-w, w)^3`` with half-width
``w = n^(1/3)/2``.  Targets are the detectable regions themselves: the raw
shape already inflated by the detection radius ``d``.  Four canonical shapes
are supported:

* ``ball``  -- sphere of radius ``R`` (``R >= d``),
* ``disc``  -- flat disc of radius ``R`` thickened to total thickness ``2d``,
* ``line``  -- segment of length ``L`` inflated to a capsule of radius ``d``
  (overall length ``L + 2d``),
* ``rect``  -- an ``a x b`` rectangle extruded to total thickness ``2d``.

Descriptors follow the bounding-box conventions used throughout the package:
``delta_B`` is the area of the largest face of the axis-aligned bounding box,
``delta_P`` the largest silhouette among projections onto the box faces, and
the elongation ``delta`` satisfies ``x3 = delta_B ** delta`` for the longest
box side ``x3``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

APPROX_CONVEX_THRESHOLD = 1.0 / 36.0


# ---------------------------------------------------------------------------
# torus arithmetic
# ---------------------------------------------------------------------------

def wrap_coords(p, half_width):
    """Map raw coordinates into ``[-half_width, half_width)`` (periodic).

    Accepts a single 3-vector or an ``(N, 3)`` array; returns an array of the
    same shape.  Each output coordinate is congruent to the input modulo the
    full period ``2 * half_width``.
    """
    if half_width <= 0:
        raise InvalidInputError(f"half_width must be positive, got {half_width}")
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("coordinates must be finite")
    period = 2.0 * half_width
    out = np.mod(arr + half_width, period) - half_width
    # float rounding in np.mod can land exactly on +half_width
    return np.where(out >= half_width, out - period, out)


@dataclass(frozen=True)
class TorusPoint:
    """A position on the torus, normalized to ``[-half_width, half_width)^3``."""

    x: float
    y: float
    z: float
    half_width: float

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def wrap(p, half_width) -> TorusPoint:
    """Normalize a raw 3-vector into the torus and return a :class:`TorusPoint`."""
    arr = wrap_coords(p, half_width)
    if arr.shape != (3,):
        raise InvalidInputError(f"expected a 3-vector, got shape {arr.shape}")
    return TorusPoint(float(arr[0]), float(arr[1]), float(arr[2]), float(half_width))


def torus_displacement(a: TorusPoint, b: TorusPoint) -> np.ndarray:
    """Minimum-image difference ``a - b``; its norm is the geodesic distance."""
    if a.half_width != b.half_width:
        raise InvalidInputError(
            f"points live on different tori: half_width {a.half_width} vs {b.half_width}"
        )
    return wrap_coords(a.vec - b.vec, a.half_width)


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

class ShapeKind(enum.Enum):
    BALL = "ball"
    DISC = "disc"
    LINE = "line"
    RECT = "rect"


@dataclass(frozen=True)
class Target:
    """A detectable region: canonical shape inflated by the detection radius.

    ``axis`` is the distinguished coordinate axis (0, 1 or 2): the line
    direction, or the disc/rect normal.  ``p1``/``p2`` are the shape
    parameters (ball/disc radius, line length, rect sides).  The shape is
    centered at ``center`` and axis-aligned.
    """

    kind: ShapeKind
    p1: float
    p2: float | None
    d: float
    axis: int = 2
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.d < 1.0:
            raise InvalidInputError(f"detection radius must be >= 1, got {self.d}")
        if self.axis not in (0, 1, 2):
            raise InvalidInputError(f"axis must be 0, 1 or 2, got {self.axis}")
        if self.p1 <= 0 or (self.p2 is not None and self.p2 <= 0):
            raise InvalidInputError("shape parameters must be positive")
        if self.kind is ShapeKind.BALL and self.p1 < self.d:
            raise InvalidInputError(
                f"ball radius {self.p1} is smaller than the detection radius {self.d}"
            )
        if self.kind is ShapeKind.DISC and self.p1 < self.d:
            raise InvalidInputError(
                f"disc radius {self.p1} is smaller than the detection radius {self.d}"
            )

    # -- constructors -------------------------------------------------------

    @staticmethod
    def ball(radius, d=1.0, center=(0.0, 0.0, 0.0)) -> "Target":
        """Ball of radius ``radius`` (the detectable region itself)."""
        return Target(ShapeKind.BALL, float(radius), None, float(d), 2, tuple(center))

    @staticmethod
    def disc(radius, d=1.0, axis=2, center=(0.0, 0.0, 0.0)) -> "Target":
        """Disc of radius ``radius`` and total thickness ``2 d``, normal ``axis``."""
        return Target(ShapeKind.DISC, float(radius), None, float(d), axis, tuple(center))

    @staticmethod
    def line(length, d=1.0, axis=0, center=(0.0, 0.0, 0.0)) -> "Target":
        """Capsule around a segment of length ``length`` directed along ``axis``."""
        return Target(ShapeKind.LINE, float(length), None, float(d), axis, tuple(center))

    @staticmethod
    def rect(side_a, side_b, d=1.0, axis=2, center=(0.0, 0.0, 0.0)) -> "Target":
        """Rectangle ``side_a x side_b`` extruded to thickness ``2 d``, normal ``axis``.

        ``side_a`` lies along the lower-indexed of the two in-plane axes.
        """
        return Target(ShapeKind.RECT, float(side_a), float(side_b), float(d), axis, tuple(center))

    # -- extents ------------------------------------------------------------

    def half_extents(self) -> np.ndarray:
        """Per-axis half-extent of the shape (box half-sides), world axes."""
        h = np.empty(3)
        k = self.axis
        others = [i for i in range(3) if i != k]
        if self.kind is ShapeKind.BALL:
            h[:] = self.p1
        elif self.kind is ShapeKind.DISC:
            h[k] = self.d
            h[others] = self.p1
        elif self.kind is ShapeKind.LINE:
            h[k] = self.p1 / 2.0 + self.d
            h[others] = self.d
        else:  # RECT
            h[k] = self.d
            h[others[0]] = self.p1 / 2.0
            h[others[1]] = self.p2 / 2.0
        return h

    def box_sides(self) -> np.ndarray:
        """Bounding-box side lengths, sorted ascending (x1 <= x2 <= x3)."""
        return np.sort(2.0 * self.half_extents())

    def check_fits(self, half_width: float) -> None:
        """Require every half-extent < torus half-width (no wrap self-overlap).

        A ball of radius >= half_width * sqrt(3) covers the whole torus; that
        degenerate case is allowed (membership is identically true), as a
        start-inside proxy.
        """
        if self.kind is ShapeKind.BALL and self.p1 >= half_width * math.sqrt(3.0):
            return
        if np.any(self.half_extents() >= half_width):
            raise InvalidInputError(
                f"{self.kind.value} target with half-extents {self.half_extents()} "
                f"does not fit a torus of half-width {half_width}"
            )


def _contains_disp(t: Target, r: np.ndarray) -> np.ndarray:
    """Membership test for displacement(s) ``r`` from the target center.

    ``r`` has shape ``(3,)`` or ``(N, 3)``; boundary points count as inside.
    """
    r = np.atleast_2d(np.asarray(r, dtype=float))
    k = t.axis
    others = [i for i in range(3) if i != k]
    if t.kind is ShapeKind.BALL:
        inside = np.einsum("ij,ij->i", r, r) <= t.p1 * t.p1
    elif t.kind is ShapeKind.DISC:
        perp2 = r[:, others[0]] ** 2 + r[:, others[1]] ** 2
        inside = (np.abs(r[:, k]) <= t.d) & (perp2 <= t.p1 * t.p1)
    elif t.kind is ShapeKind.LINE:
        # distance to the axis segment of length L: clamp the axial excess
        excess = np.maximum(np.abs(r[:, k]) - t.p1 / 2.0, 0.0)
        perp2 = r[:, others[0]] ** 2 + r[:, others[1]] ** 2
        inside = excess * excess + perp2 <= t.d * t.d
    else:  # RECT
        inside = (
            (np.abs(r[:, k]) <= t.d)
            & (np.abs(r[:, others[0]]) <= t.p1 / 2.0)
            & (np.abs(r[:, others[1]]) <= t.p2 / 2.0)
        )
    return inside


def contains_points(t: Target, points: np.ndarray, half_width: float) -> np.ndarray:
    """Vectorized membership for an ``(N, 3)`` array of torus points."""
    t.check_fits(half_width)
    disp = wrap_coords(np.asarray(points, dtype=float) - np.asarray(t.center), half_width)
    return _contains_disp(t, disp)


def contains(t: Target, p: TorusPoint) -> bool:
    """True iff the minimum-image displacement from the center lies in the shape."""
    return bool(contains_points(t, p.vec[None, :], p.half_width)[0])


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeoDescriptors:
    """Analytic geometric descriptors of a target."""

    volume: float
    surface_area: float
    delta_B: float
    delta_P: float
    elongation: float
    approx_convex: bool
    box: tuple[float, float, float]  # sorted ascending


def descriptors(t: Target) -> GeoDescriptors:
    """Closed-form descriptors for the four canonical shapes."""
    d = t.d
    if t.kind is ShapeKind.BALL:
        R = t.p1
        volume = 4.0 * math.pi * R**3 / 3.0
        surface = 4.0 * math.pi * R**2
        delta_p = math.pi * R**2
    elif t.kind is ShapeKind.DISC:
        R = t.p1
        volume = 2.0 * math.pi * R**2 * d
        surface = 2.0 * math.pi * R**2 + 4.0 * math.pi * R * d
        delta_p = math.pi * R**2
    elif t.kind is ShapeKind.LINE:
        L = t.p1
        volume = math.pi * d**2 * L + 4.0 * math.pi * d**3 / 3.0
        surface = 2.0 * math.pi * d * L + 4.0 * math.pi * d**2
        # capsule silhouette on the largest box face: 2d x L rectangle plus
        # two half-disc caps
        delta_p = 2.0 * d * L + math.pi * d**2
    else:  # RECT
        a, b = t.p1, t.p2
        volume = 2.0 * a * b * d
        surface = 2.0 * a * b + 4.0 * d * (a + b)
        delta_p = None  # box silhouette equals the largest face, set below
    box = t.box_sides()
    x1, x2, x3 = float(box[0]), float(box[1]), float(box[2])
    delta_b = x2 * x3
    if delta_p is None:
        delta_p = delta_b
    if delta_b <= 1.0:
        raise InvalidInputError("bounding box too small for a meaningful elongation")
    elongation = math.log(x3) / math.log(delta_b)
    return GeoDescriptors(
        volume=volume,
        surface_area=surface,
        delta_B=delta_b,
        delta_P=float(delta_p),
        elongation=elongation,
        approx_convex=delta_p / delta_b >= APPROX_CONVEX_THRESHOLD,
        box=(x1, x2, x3),
    )


def counterexample_ratio(L: float, d: float = 1.0) -> float:
    """``delta_P / delta_B`` for a cross of two orthogonal strips.

    The shape is two coplanar orthogonal strips crossing at the center, each
    of length ``L``, width ``d`` and thickness ``d``.  Its bounding box is
    ``L x L x d``, so ``delta_B = L^2``, while the largest silhouette is the
    crossed-strip area ``2 d L - d^2``.  The ratio decays as ``Theta(1/L)``
    and drops below the approximate-convexity threshold once ``L`` is large.
    """
    if d <= 0 or L < 2.0 * d:
        raise InvalidInputError(f"need L >= 2 d > 0, got L={L}, d={d}")
    return (2.0 * d * L - d * d) / (L * L)


@dataclass(frozen=True)
class MCArea:
    """Monte Carlo silhouette-area estimate with its standard error."""

    estimate: float
    stderr: float
    samples: int


def mc_projected_area(t: Target, samples: int, seed=0) -> MCArea:
    """Estimate ``delta_P`` by uniform point sampling on the largest box face.

    Samples points on the largest bounding-box face and tests membership on
    the target's central cross-section plane with the same predicate the
    walker uses.  All canonical shapes are symmetric and convex along the
    face normal, so a face point lies in the silhouette exactly when the
    central-plane point lies in the solid.
    """
    if samples < 10_000:
        raise InvalidInputError(f"need at least 1e4 samples, got {samples}")
    sides = 2.0 * t.half_extents()
    face_axes = np.argsort(sides)[1:]  # the two largest sides span the face
    u_ax, v_ax = int(face_axes[0]), int(face_axes[1])
    rng = np.random.default_rng(seed)
    disp = np.zeros((samples, 3))
    disp[:, u_ax] = (rng.random(samples) - 0.5) * sides[u_ax]
    disp[:, v_ax] = (rng.random(samples) - 0.5) * sides[v_ax]
    hits = _contains_disp(t, disp)
    face_area = sides[u_ax] * sides[v_ax]
    p_hat = hits.mean()
    stderr = face_area * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / samples)
    return MCArea(float(face_area * p_hat), float(stderr), samples)
