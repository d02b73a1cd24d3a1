"""Planar primitives: sampled curves, polygons, areas, and the standard lens.

The lens with area m is the intersection of two disks of radius r_m centered
at (0, -r_m/2) and (0, +r_m/2).  Its two circular arcs meet the horizontal
axis at the vertices (+-(sqrt(3)/2) r_m, 0) at 120 degrees, and

    r_m = sqrt(m) * (2*pi/3 - sqrt(3)/2) ** (-1/2)

so that the enclosed area is exactly m.

All operations here are pure functions on immutable values.  Polygon boolean
areas are delegated to shapely (GEOS) behind the module's contracts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from .errors import DomainError, ValidationError

# Area of the lens with unit radius: 2*pi/3 - sqrt(3)/2.
UNIT_LENS_AREA = 2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0

# Half the opening angle subtended by each lens arc at its circle center.
ARC_HALF_ANGLE = math.pi / 3.0

GEOM_SCHEMA = "geom/1"

Point = tuple[float, float]


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError(f"expected an (n, 2) array of points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValidationError("points must have finite coordinates")
    return pts


@dataclass(frozen=True)
class Polyline:
    """An ordered sampled curve; closed polylines must be simple."""

    points: np.ndarray
    closed: bool = False

    def __init__(self, points, closed: bool = False, validate: bool = True):
        pts = _as_points(points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "closed", bool(closed))
        if validate:
            self._validate()

    def _validate(self) -> None:
        pts = self.points
        if len(pts) < 2:
            raise ValidationError("a polyline needs at least 2 points")
        seg = np.diff(pts, axis=0)
        if np.any((seg[:, 0] == 0.0) & (seg[:, 1] == 0.0)):
            raise ValidationError("consecutive polyline points must be distinct")
        if self.closed:
            if len(pts) < 3:
                raise ValidationError("a closed polyline needs at least 3 points")
            ring = shapely.LinearRing(pts)
            if not ring.is_valid or not ring.is_simple:
                raise ValidationError("closed polyline must be simple (non-self-intersecting)")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Polygon:
    """A simple polygon with counterclockwise boundary and positive area."""

    boundary: Polyline = field(repr=False)

    def __init__(self, points, validate: bool = True):
        pts = _as_points(points)
        # Drop an explicitly repeated closing vertex.
        if len(pts) >= 2 and pts[0, 0] == pts[-1, 0] and pts[0, 1] == pts[-1, 1]:
            pts = pts[:-1]
        if validate and len(pts) < 3:
            raise ValidationError("a polygon needs at least 3 distinct vertices")
        if _shoelace(pts) < 0.0:
            pts = pts[::-1].copy()
        object.__setattr__(self, "boundary", Polyline(pts, closed=True, validate=validate))
        if validate and _shoelace(pts) <= 0.0:
            raise ValidationError("polygon must enclose positive area")

    @property
    def points(self) -> np.ndarray:
        return self.boundary.points

    def to_shapely(self) -> shapely.Polygon:
        return shapely.Polygon(self.points)

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(self.points + np.array([dx, dy]), validate=False)

    def scaled(self, factor: float) -> "Polygon":
        if factor <= 0.0:
            raise DomainError("scale factor must be positive")
        return Polygon(self.points * factor, validate=False)


@dataclass(frozen=True)
class LensSpec:
    """Analytic description of the standard lens with area ``mass``."""

    mass: float
    radius: float
    half_width: float
    p1: Point
    p2: Point

    @classmethod
    def from_mass(cls, mass: float) -> "LensSpec":
        r = lens_radius(mass)
        hw = 0.5 * math.sqrt(3.0) * r
        return cls(mass=float(mass), radius=r, half_width=hw, p1=(-hw, 0.0), p2=(hw, 0.0))

    @classmethod
    def unit_radius(cls) -> "LensSpec":
        """The lens normalized to radius 1 (mass 2*pi/3 - sqrt(3)/2)."""
        return cls.from_mass(UNIT_LENS_AREA)

    def upper_profile(self, x) -> np.ndarray:
        """Height of the upper arc: sqrt(r^2 - x^2) - r/2 on |x| <= half_width."""
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.maximum(self.radius**2 - x**2, 0.0)) - 0.5 * self.radius


def lens_radius(mass: float) -> float:
    """Radius of the two arcs bounding the lens of area ``mass``."""
    if not (mass > 0.0) or not math.isfinite(mass):
        raise DomainError(f"lens mass must be positive and finite, got {mass}")
    return math.sqrt(mass) / math.sqrt(UNIT_LENS_AREA)


def lens_boundary(spec: LensSpec, n: int) -> tuple[Polyline, Polyline]:
    """Sample the two lens arcs with ``n`` points each, uniformly in arc length.

    Both arcs run from p1 to p2; endpoints are placed exactly at the vertices.
    Uniform arc-length sampling keeps the tangent error uniform near the
    120-degree corners.
    """
    if n < 8:
        raise DomainError("need at least 8 samples per arc")
    r = spec.radius
    # Upper arc lies on the circle centered at (0, -r/2); the arc spans the
    # central angles [pi/6, 5*pi/6].
    theta = np.linspace(5.0 * math.pi / 6.0, math.pi / 6.0, n)
    upper = np.column_stack([r * np.cos(theta), r * np.sin(theta) - 0.5 * r])
    upper[0] = spec.p1
    upper[-1] = spec.p2
    lower = upper.copy()
    lower[:, 1] = -lower[:, 1]
    return (
        Polyline(upper, closed=False, validate=False),
        Polyline(lower, closed=False, validate=False),
    )


def lens_polygon(spec: LensSpec, n: int) -> Polygon:
    """Closed lens outline from the two sampled arcs (counterclockwise)."""
    upper, lower = lens_boundary(spec, n)
    pts = np.vstack([lower.points[:-1], upper.points[::-1][:-1]])
    return Polygon(pts, validate=False)


def polyline_length(c: Polyline) -> float:
    """Sum of segment lengths (plus the closing segment when closed)."""
    pts = c.points
    seg = np.diff(pts, axis=0)
    total = float(np.sum(np.hypot(seg[:, 0], seg[:, 1])))
    if c.closed:
        total += float(np.hypot(*(pts[0] - pts[-1])))
    return total


def _shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(p: Polygon) -> float:
    """Shoelace area; positive by the counterclockwise orientation invariant."""
    return _shoelace(p.points)


def symmetric_difference_area(a: Polygon, b: Polygon) -> float:
    """|a (triangle) b| = |a| + |b| - 2 |a & b| via exact polygon booleans."""
    sa, sb = a.to_shapely(), b.to_shapely()
    if not sa.is_valid or not sb.is_valid:
        raise ValidationError("symmetric_difference_area needs simple polygons")
    inter = sa.intersection(sb).area
    return sa.area + sb.area - 2.0 * inter


def meeting_angle(arc: Polyline, at: Point) -> float:
    """Angle of the one-sided tangent of ``arc`` at endpoint ``at``.

    Measured against the positive horizontal axis, in (-pi, pi].  The tangent
    points from ``at`` into the curve.
    """
    pts = arc.points
    target = np.asarray(at, dtype=float)
    scale = max(1.0, float(np.max(np.abs(pts))))
    if np.allclose(pts[0], target, rtol=0.0, atol=1e-9 * scale):
        d = pts[1] - pts[0]
    elif np.allclose(pts[-1], target, rtol=0.0, atol=1e-9 * scale):
        d = pts[-2] - pts[-1]
    else:
        raise DomainError("meeting_angle: point is not an endpoint of the arc")
    return math.atan2(d[1], d[0])


def to_json(obj: Polyline | Polygon) -> str:
    """Serialize to the 'geom/1' JSON schema."""
    if isinstance(obj, Polygon):
        payload = {
            "schema": GEOM_SCHEMA,
            "kind": "polygon",
            "points": obj.points.tolist(),
        }
    elif isinstance(obj, Polyline):
        payload = {
            "schema": GEOM_SCHEMA,
            "kind": "polyline",
            "closed": obj.closed,
            "points": obj.points.tolist(),
        }
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__}")
    return json.dumps(payload)


def from_json(text: str) -> Polyline | Polygon:
    """Parse a 'geom/1' JSON document."""
    payload = json.loads(text)
    if payload.get("schema") != GEOM_SCHEMA:
        raise ValidationError(f"unsupported geometry schema: {payload.get('schema')!r}")
    kind = payload.get("kind")
    if kind == "polygon":
        return Polygon(payload["points"])
    if kind == "polyline":
        return Polyline(payload["points"], closed=bool(payload.get("closed", False)))
    raise ValidationError(f"unknown geometry kind: {kind!r}")
