"""Lens-type 3-partitions in a window: perimeter, deficit, distance, asymmetry.

A lens-type partition splits the plane into one bounded chamber and two
half-plane-like chambers.  Restricted to the slab |x| <= window_radius every
partition handled here is column-decomposable: two piecewise-linear envelopes
``top`` and ``bot`` over x determine the three chambers,

    chamber 1 (finite)  = { bot(x) <= y <= top(x) }   (empty where top == bot)
    chamber 2 (upper)   = { y > top(x) }
    chamber 3 (lower)   = { y < bot(x) }

which makes chamber symmetric differences one-dimensional integrals of
piecewise-linear functions.  Those integrals are evaluated exactly (including
sign-change cells), so distances of explicit constructions like the offset
strip carry no quadrature error.

The perimeter of a partition relative to the slab is the boundary length of
the finite chamber plus the length of the interface between the two infinite
chambers inside the slab.  Because every competitor is flat near the window
boundary, deficits are window-independent by construction.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .errors import AccuracyError, ConstraintError, DomainError, ValidationError
from .geometry import LensSpec, Polygon, Polyline, polygon_area, polyline_length

PARTITION_SCHEMA = "partition/1"

AREA_RTOL = 1e-6            # admissibility tolerance, relative to the mass
DEVIATION_SNAP = 1e-12      # envelope deviations below this count as zero
GRAPH_RAW_RTOL = 1e-6       # allowed graph-formula vs raw-perimeter discrepancy


# ---------------------------------------------------------------------------
# exact integrals of piecewise-linear integrands
# ---------------------------------------------------------------------------

def _abs_integral(xs: np.ndarray, f: np.ndarray) -> float:
    """Exact integral of |f| for f piecewise linear on breakpoints xs."""
    return float(np.sum(_abs_cells(np.diff(xs), f)))


def _pos_integral(xs: np.ndarray, f: np.ndarray) -> float:
    """Exact integral of max(f, 0) for f piecewise linear on xs."""
    return float(np.sum(_pos_cells(np.diff(xs), f)))


def _interval_symdiff_integral(
    xs: np.ndarray,
    lo_a: np.ndarray,
    hi_a: np.ndarray,
    lo_b: np.ndarray,
    hi_b: np.ndarray,
) -> float:
    """Integrated symmetric difference of column intervals [lo,hi] vs [lo,hi].

    Columns with hi <= lo are empty.  Per column the symmetric difference is
    min(|lo_a-lo_b| + |hi_a-hi_b|, len_a + len_b); the two branches are
    integrated exactly per cell and the smaller one taken, which is exact
    except in cells where the active branch switches (error O(h^2)).
    """
    h = np.diff(xs)
    dlo, dhi = lo_a - lo_b, hi_a - hi_b
    branch1 = _abs_cells(h, dlo) + _abs_cells(h, dhi)
    branch2 = _pos_cells(h, hi_a - lo_a) + _pos_cells(h, hi_b - lo_b)
    return float(np.sum(np.minimum(branch1, branch2)))


def _abs_cells(h: np.ndarray, f: np.ndarray) -> np.ndarray:
    a, b = f[:-1], f[1:]
    aa, ab = np.abs(a), np.abs(b)
    trap = 0.5 * h * (aa + ab)
    exact = 0.5 * h * (a * a + b * b) / (aa + ab + 1e-300)
    return np.where(a * b < 0.0, exact, trap)


def _pos_cells(h: np.ndarray, f: np.ndarray) -> np.ndarray:
    a, b = f[:-1], f[1:]
    trap = 0.5 * h * (a + b)
    pos = np.maximum(a, b)
    exact = 0.5 * h * pos * pos / (np.abs(a) + np.abs(b) + 1e-300)
    both_pos = np.minimum(a, b) >= 0.0
    return np.where(a * b < 0.0, exact, np.where(both_pos, trap, 0.0))


def _strictify(xs: np.ndarray) -> np.ndarray:
    """Separate duplicated breakpoints (vertical segments) by a tiny step."""
    d = np.diff(xs)
    if np.all(d > 0.0):
        return xs
    if np.any(d < 0.0):
        raise ValidationError("envelope breakpoints must be non-decreasing")
    eps = max(1e-13, 1e-13 * float(xs[-1] - xs[0]))
    bump = np.concatenate([[0.0], np.cumsum(np.where(d <= 0.0, eps, 0.0))])
    return xs + bump


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphTriple:
    """Three sampled graphs encoding a lens-type perturbation boundary.

    ``g1 >= g2`` bound the finite chamber over the dilated interval
    I_sigma = [-(1+sigma)*hw, (1+sigma)*hw]; ``g0`` is the interface between
    the two infinite chambers on each outer interval, vanishing at the window
    boundary.  All three agree at the two junctions.
    """

    sigma: float
    lens: LensSpec
    window_radius: float
    xs_in: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    xs_left: np.ndarray
    g0_left: np.ndarray
    xs_right: np.ndarray
    g0_right: np.ndarray

    def __post_init__(self):
        hw = (1.0 + self.sigma) * self.lens.half_width
        rw = self.window_radius
        if rw <= hw:
            raise ValidationError("window radius must exceed the dilated lens half-width")
        for name, xs in (("xs_in", self.xs_in), ("xs_left", self.xs_left), ("xs_right", self.xs_right)):
            if np.any(np.diff(xs) <= 0.0):
                raise ValidationError(f"{name} must be strictly increasing")
        tol = 1e-9 * max(1.0, rw)
        if abs(self.xs_in[0] + hw) > tol or abs(self.xs_in[-1] - hw) > tol:
            raise ValidationError("xs_in must span the dilated lens interval")
        if abs(self.xs_left[0] + rw) > tol or abs(self.xs_left[-1] + hw) > tol:
            raise ValidationError("xs_left must span [-R_w, -(1+sigma)*hw]")
        if abs(self.xs_right[0] - hw) > tol or abs(self.xs_right[-1] - rw) > tol:
            raise ValidationError("xs_right must span [(1+sigma)*hw, R_w]")
        if np.any(self.g1 < self.g2 - DEVIATION_SNAP):
            raise ValidationError("g1 must dominate g2 pointwise")
        if abs(self.g0_left[0]) > tol or abs(self.g0_right[-1]) > tol:
            raise ValidationError("g0 must vanish at the window boundary (compact support)")
        for v in (self.g0_left[-1] - self.g1[0], self.g0_left[-1] - self.g2[0],
                  self.g0_right[0] - self.g1[-1], self.g0_right[0] - self.g2[-1]):
            if abs(v) > tol:
                raise ValidationError("g0, g1, g2 must match at the junctions")

    @property
    def junction_half_width(self) -> float:
        return (1.0 + self.sigma) * self.lens.half_width

    def dilated_reference(self) -> tuple[np.ndarray, np.ndarray]:
        """The dilated lens arcs (1+sigma) u(x / (1+sigma)) on xs_in."""
        s = 1.0 + self.sigma
        u = s * self.lens.upper_profile(self.xs_in / s)
        return u, -u


@dataclass(frozen=True)
class ColumnField:
    """Piecewise-linear chamber envelopes over strictly increasing breakpoints."""

    xs: np.ndarray
    top: np.ndarray
    bot: np.ndarray


@dataclass(frozen=True)
class LensTypePartition:
    finite_chamber: Polygon
    interface_left: Polyline
    interface_right: Polyline
    window_radius: float
    chamber_samples: int
    field: ColumnField = field(repr=False)
    triple: GraphTriple | None = None

    def chamber_area(self) -> float:
        return polygon_area(self.finite_chamber)


@dataclass(frozen=True)
class StabilityRecord:
    """Deficit/asymmetry measurements for one competitor."""

    id: str
    sigma: float
    deficit: float
    asymmetry: float
    fuglede_bound: float | None = None
    valid: bool = True

    @property
    def ratio(self) -> float | None:
        if self.asymmetry <= 0.0:
            return None
        return self.deficit / self.asymmetry**2

    def csv_row(self) -> dict:
        return {
            "id": self.id,
            "sigma": f"{self.sigma:.12g}",
            "deficit": f"{self.deficit:.12g}",
            "asymmetry": f"{self.asymmetry:.12g}",
            "ratio": "" if self.ratio is None else f"{self.ratio:.12g}",
            "fugledeBound": "" if self.fuglede_bound is None else f"{self.fuglede_bound:.12g}",
        }


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def from_graphs(g: GraphTriple) -> LensTypePartition:
    """Assemble the partition bounded by the three graphs of a GraphTriple."""
    if np.any(g.g1 < g.g2 - DEVIATION_SNAP):
        raise ValidationError("g1 must dominate g2 pointwise")
    bottom = np.column_stack([g.xs_in, g.g2])
    top = np.column_stack([g.xs_in, g.g1])[::-1]
    chamber = Polygon(np.vstack([bottom, top[1:-1]]), validate=False)

    left = Polyline(np.column_stack([g.xs_left, g.g0_left]), validate=False)
    right = Polyline(np.column_stack([g.xs_right, g.g0_right]), validate=False)

    xs = np.concatenate([g.xs_left, g.xs_in[1:-1], g.xs_right])
    top_env = np.concatenate([g.g0_left, g.g1[1:-1], g.g0_right])
    bot_env = np.concatenate([g.g0_left, g.g2[1:-1], g.g0_right])
    fld = ColumnField(xs=_strictify(xs), top=top_env, bot=bot_env)

    return LensTypePartition(
        finite_chamber=chamber,
        interface_left=left,
        interface_right=right,
        window_radius=g.window_radius,
        chamber_samples=len(g.xs_in),
        field=fld,
        triple=g,
    )


def _lens_chamber_points(spec: LensSpec, n: int, dx: float = 0.0) -> np.ndarray:
    xs = np.linspace(-spec.half_width, spec.half_width, n) + dx
    u = spec.upper_profile(xs - dx)
    bottom = np.column_stack([xs, -u])
    top = np.column_stack([xs, u])[::-1]
    return np.vstack([bottom, top[1:-1]])


@functools.lru_cache(maxsize=32)
def _lens_chamber_perimeter(spec: LensSpec, n: int) -> float:
    return polyline_length(Polyline(_lens_chamber_points(spec, n), closed=True, validate=False))


def lens_partition(
    spec: LensSpec,
    window_radius: float,
    n: int = 4096,
    n_outer: int = 2048,
    dx: float = 0.0,
) -> LensTypePartition:
    """The standard lens partition in the window, optionally shifted by dx.

    The chamber arcs are sampled uniformly in x so that deficits computed
    against this reference cancel discretization error exactly for
    graph-built competitors on matching grids.
    """
    hw = spec.half_width
    if window_radius <= hw + abs(dx):
        raise DomainError("window radius too small to contain the lens")
    if dx == 0.0:
        return _canonical_lens_partition(spec, window_radius, n, n_outer)

    chamber = Polygon(_lens_chamber_points(spec, n, dx=dx), validate=False)
    xs_l = np.linspace(-window_radius, -hw + dx, n_outer)
    xs_r = np.linspace(hw + dx, window_radius, n_outer)
    left = Polyline(np.column_stack([xs_l, np.zeros(n_outer)]), validate=False)
    right = Polyline(np.column_stack([xs_r, np.zeros(n_outer)]), validate=False)
    xs_in = np.linspace(-hw, hw, n) + dx
    u = spec.upper_profile(xs_in - dx)
    xs = np.concatenate([xs_l, xs_in[1:-1], xs_r])
    top = np.concatenate([np.zeros(n_outer), u[1:-1], np.zeros(n_outer)])
    fld = ColumnField(xs=_strictify(xs), top=top, bot=-top)
    return LensTypePartition(
        finite_chamber=chamber,
        interface_left=left,
        interface_right=right,
        window_radius=window_radius,
        chamber_samples=n,
        field=fld,
        triple=None,
    )


@functools.lru_cache(maxsize=16)
def _canonical_lens_partition(
    spec: LensSpec, window_radius: float, n: int, n_outer: int
) -> LensTypePartition:
    triple = GraphTriple(
        sigma=0.0,
        lens=spec,
        window_radius=window_radius,
        xs_in=np.linspace(-spec.half_width, spec.half_width, n),
        g1=spec.upper_profile(np.linspace(-spec.half_width, spec.half_width, n)),
        g2=-spec.upper_profile(np.linspace(-spec.half_width, spec.half_width, n)),
        xs_left=np.linspace(-window_radius, -spec.half_width, n_outer),
        g0_left=np.zeros(n_outer),
        xs_right=np.linspace(spec.half_width, window_radius, n_outer),
        g0_right=np.zeros(n_outer),
    )
    return from_graphs(triple)


# ---------------------------------------------------------------------------
# perimeter and deficit
# ---------------------------------------------------------------------------

def relative_perimeter(p: LensTypePartition) -> float:
    """Finite-chamber boundary length plus the 2-3 interface length in the slab."""
    return (
        polyline_length(p.finite_chamber.boundary)
        + polyline_length(p.interface_left)
        + polyline_length(p.interface_right)
    )


def _graph_deficit(g: GraphTriple) -> float:
    """Deficit of a graph-built competitor, evaluated directly on the graphs.

    Equals the interface length excess plus the chamber-arc length change
    minus 2*sigma*hw, all as exact chord sums on the sample grids.
    """
    excess = 0.0
    for xs, vals in ((g.xs_left, g.g0_left), (g.xs_right, g.g0_right)):
        seg = np.hypot(np.diff(xs), np.diff(vals))
        excess += float(np.sum(seg)) - float(xs[-1] - xs[0])
    chords = 0.0
    for vals in (g.g1, g.g2):
        chords += float(np.sum(np.hypot(np.diff(g.xs_in), np.diff(vals))))
    ref = _lens_chamber_perimeter(g.lens, len(g.xs_in))
    return excess + chords - ref - 2.0 * g.sigma * g.lens.half_width


def deficit(p: LensTypePartition, spec: LensSpec) -> float:
    """Relative-perimeter excess of ``p`` over the lens partition.

    Requires the finite chamber to carry the lens mass (admissibility);
    otherwise the comparison is meaningless and a ConstraintError is raised.
    """
    area = p.chamber_area()
    if abs(area - spec.mass) > AREA_RTOL * spec.mass:
        raise ConstraintError(
            f"finite-chamber area {area:.9g} differs from mass {spec.mass:.9g} "
            f"beyond tolerance {AREA_RTOL:g} (relative)"
        )
    ref = _lens_chamber_perimeter(spec, p.chamber_samples) + 2.0 * (
        p.window_radius - spec.half_width
    )
    raw = relative_perimeter(p) - ref
    if p.triple is None:
        return raw
    graph = _graph_deficit(p.triple)
    scale = max(1.0, abs(graph))
    if abs(graph - raw) > GRAPH_RAW_RTOL * scale:
        raise AccuracyError(
            f"graph-formula deficit {graph:.12g} disagrees with raw perimeter "
            f"difference {raw:.12g}",
            best_estimate=graph,
            error_estimate=abs(graph - raw),
        )
    return graph


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------

def _field_on(xs: np.ndarray, fld: ColumnField) -> tuple[np.ndarray, np.ndarray]:
    top = np.interp(xs, fld.xs, fld.top)
    bot = np.interp(xs, fld.xs, fld.bot)
    return top, bot


def _distance_on_grid(
    xs: np.ndarray,
    top_a: np.ndarray,
    bot_a: np.ndarray,
    top_b: np.ndarray,
    bot_b: np.ndarray,
    window_radius: float,
) -> float:
    rw = window_radius
    ta, ba = np.clip(top_a, -rw, rw), np.clip(bot_a, -rw, rw)
    tb, bb = np.clip(top_b, -rw, rw), np.clip(bot_b, -rw, rw)
    upper = _abs_integral(xs, ta - tb)
    lower = _abs_integral(xs, ba - bb)
    finite = _interval_symdiff_integral(xs, ba, ta, bb, tb)
    return 0.5 * (finite + upper + lower)


def partition_distance(p: LensTypePartition, q: LensTypePartition) -> float:
    """Half-sum of chamber symmetric differences inside the window."""
    if abs(p.window_radius - q.window_radius) > 1e-12 * max(1.0, p.window_radius):
        raise DomainError("partition_distance requires matching window radii")
    xs = np.union1d(p.field.xs, q.field.xs)
    ta, ba = _field_on(xs, p.field)
    tb, bb = _field_on(xs, q.field)
    return _distance_on_grid(xs, ta, ba, tb, bb, p.window_radius)


# ---------------------------------------------------------------------------
# asymmetry: restricted isometry search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    """Multistart simplex search over lens isometries.

    The exact infimum over all isometries is not computable; the search
    reports an upper bound on it, which keeps empirical stability-ratio
    estimates conservative.  Translation starts form a 3x3 grid on
    [-r, r]^2; rotation starts are taken at the zero translation.  Every
    start gets a short simplex run and the best start a long polish.  The
    y-reflection swaps the two infinite chambers and is only useful for
    mirror-symmetric competitors, so it is off by default; the x-reflection
    maps the lens partition to itself and is accepted for API parity.
    """

    rotation_starts: tuple[float, ...] = (-math.pi / 6.0, 0.0, math.pi / 6.0)
    include_y_reflection: bool = False
    include_x_reflection: bool = False
    grid_points: int = 4096
    xatol: float = 1e-6
    fatol: float = 1e-10
    screen_evals: int = 60
    polish_evals: int = 250

    def translation_grid(self, r: float) -> list[tuple[float, float]]:
        vals = (-r, 0.0, r)
        return [(dx, dy) for dx in vals for dy in vals]


def _nelder_mead(f, x0: np.ndarray, scales: np.ndarray, xatol: float, fatol: float,
                 maxfev: int) -> tuple[np.ndarray, float]:
    """Minimal deterministic Nelder-Mead (reflection 1, expansion 2,
    contraction 1/2, shrink 1/2) for smooth low-dimensional objectives."""
    n = len(x0)
    simplex = np.tile(np.asarray(x0, dtype=float), (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += scales[i]
    values = np.array([f(v) for v in simplex])
    nfev = n + 1
    while nfev < maxfev:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        if (np.max(np.abs(simplex[1:] - simplex[0])) <= xatol
                and np.max(np.abs(values[1:] - values[0])) <= fatol):
            break
        centroid = np.mean(simplex[:-1], axis=0)
        xr = centroid + (centroid - simplex[-1])
        fr = f(xr); nfev += 1
        if fr < values[0]:
            xe = centroid + 2.0 * (centroid - simplex[-1])
            fe = f(xe); nfev += 1
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr < values[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (simplex[-1] - centroid)
            fc = f(xc); nfev += 1
            if fc < min(fr, values[-1]):
                simplex[-1], values[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = f(simplex[i])
                nfev += n
    i_best = int(np.argmin(values))
    return simplex[i_best], float(values[i_best])


def _lens_envelopes_at(
    xs: np.ndarray,
    spec: LensSpec,
    dx: float,
    dy: float,
    theta: float,
    window_radius: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic top/bot envelopes of the lens partition moved by an isometry.

    Valid as long as the rotated arcs remain graphs over x (|theta| < pi/6 at
    the vertices); beyond that the columns degenerate and the clipped values
    still give a finite, large objective for the search to reject.
    """
    r = spec.radius
    c, s = math.cos(theta), math.sin(theta)
    # Images of the two disk centers (0, -r/2) and (0, +r/2).
    cx_u, cy_u = dx + 0.5 * r * s, dy - 0.5 * r * c
    cx_l, cy_l = dx - 0.5 * r * s, dy + 0.5 * r * c
    # Images of the vertices (+-hw, 0).
    hw = spec.half_width
    v1x, v2x = -hw * c + dx, hw * c + dx
    x_lo, x_hi = min(v1x, v2x), max(v1x, v2x)

    tan_t = math.tan(theta)
    line = dy + tan_t * (xs - dx)

    rad_u = np.sqrt(np.maximum(r**2 - (xs - cx_u) ** 2, 0.0))
    rad_l = np.sqrt(np.maximum(r**2 - (xs - cx_l) ** 2, 0.0))
    upper = np.minimum(cy_u + rad_u, cy_l + rad_l)
    lower = np.maximum(cy_u - rad_u, cy_l - rad_l)

    inside = (xs >= x_lo) & (xs <= x_hi)
    top = np.where(inside, np.maximum(upper, line), line)
    bot = np.where(inside, np.minimum(lower, line), line)
    rw = window_radius
    return np.clip(top, -rw, rw), np.clip(bot, -rw, rw)


def asymmetry(p: LensTypePartition, spec: LensSpec, search: SearchConfig | None = None) -> float:
    """Upper bound on the infimum of partition distance over lens isometries.

    Multistart Nelder-Mead over (dx, dy, theta); the identity is always a
    candidate, so the result never exceeds the distance to the unmoved lens.
    Deterministic: no randomness enters the search.
    """
    if search is None:
        search = SearchConfig()
    rw = p.window_radius
    xs = np.union1d(p.field.xs, np.linspace(-rw, rw, search.grid_points))
    h = np.diff(xs)
    top_p = np.clip(np.interp(xs, p.field.xs, p.field.top), -rw, rw)
    bot_p = np.clip(np.interp(xs, p.field.xs, p.field.bot), -rw, rw)
    len_p_cells = _pos_cells(h, top_p - bot_p)

    theta_cap = 0.9 * math.pi / 4.0
    shift_cap = 0.5 * rw
    full_rw = np.full_like(xs, rw)

    def objective_factory(flip: bool):
        def objective(u) -> float:
            dx, dy, theta = u
            penalty = 0.0
            if abs(theta) > theta_cap:
                penalty += 1e3 * (abs(theta) - theta_cap) ** 2
                theta = math.copysign(theta_cap, theta)
            for v in (dx, dy):
                if abs(v) > shift_cap:
                    penalty += 1e3 * (abs(v) - shift_cap) ** 2
            dx = min(max(dx, -shift_cap), shift_cap)
            dy = min(max(dy, -shift_cap), shift_cap)
            top_l, bot_l = _lens_envelopes_at(xs, spec, dx, dy, theta, rw)
            if flip:
                # y-reflection first: the lens maps to itself but the two
                # infinite chambers swap index, so chamber 2 of the moved
                # lens lies *below* bot_l and chamber 3 above top_l.
                d = 0.5 * (
                    _interval_symdiff_integral(xs, bot_p, top_p, bot_l, top_l)
                    + _interval_symdiff_integral(xs, top_p, full_rw, -full_rw, bot_l)
                    + _interval_symdiff_integral(xs, -full_rw, bot_p, top_l, full_rw)
                )
            else:
                cells_top = _abs_cells(h, top_p - top_l)
                cells_bot = _abs_cells(h, bot_p - bot_l)
                finite = np.minimum(
                    cells_top + cells_bot,
                    len_p_cells + _pos_cells(h, top_l - bot_l),
                )
                d = 0.5 * float(np.sum(cells_top) + np.sum(cells_bot) + np.sum(finite))
            return d + penalty
        return objective

    flips = [False]
    if search.include_y_reflection:
        flips.append(True)

    starts = [(dx, dy, 0.0) for dx, dy in search.translation_grid(spec.radius)]
    starts += [(0.0, 0.0, th) for th in search.rotation_starts if th != 0.0]
    scales = np.array([0.25 * spec.radius, 0.25 * spec.radius, 0.1])

    best = partition_distance(p, lens_partition(spec, rw, n=p.chamber_samples))
    best_u, best_obj, best_fn = None, math.inf, None
    for flip in flips:
        fn = objective_factory(flip)
        for u0 in starts:
            u, val = _nelder_mead(
                fn, np.asarray(u0, dtype=float), scales,
                xatol=10.0 * search.xatol, fatol=10.0 * search.fatol,
                maxfev=search.screen_evals,
            )
            if val < best_obj:
                best_u, best_obj, best_fn = u, val, fn
    if best_fn is not None:
        _, polished = _nelder_mead(
            best_fn, best_u, 0.05 * scales,
            xatol=search.xatol, fatol=search.fatol, maxfev=search.polish_evals,
        )
        best = min(best, polished, best_obj)
    return max(best, 0.0)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

def is_admissible(
    p: LensTypePartition, spec: LensSpec, R: float
) -> tuple[bool, list[str]]:
    """Check membership in the volume-constrained competitor class.

    True iff the finite-chamber area matches the mass within the relative
    tolerance and every deviation from the lens partition lies inside the
    ball of radius R.  Diagnostics list each violated condition.
    """
    diagnostics: list[str] = []
    area = p.chamber_area()
    if abs(area - spec.mass) > AREA_RTOL * spec.mass:
        diagnostics.append(
            f"area mismatch: chamber area {area:.9g} vs mass {spec.mass:.9g}"
        )

    ref = lens_partition(spec, p.window_radius, n=p.chamber_samples)
    xs = np.union1d(p.field.xs, ref.field.xs)
    top_p, bot_p = _field_on(xs, p.field)
    top_r, bot_r = _field_on(xs, ref.field)
    dev = np.maximum(np.abs(top_p - top_r), np.abs(bot_p - bot_r))
    active = dev > DEVIATION_SNAP
    if np.any(active):
        for ys in (top_p, bot_p, top_r, bot_r):
            rad = np.hypot(xs[active], ys[active])
            if np.any(rad >= R):
                diagnostics.append(
                    f"support outside window: deviation at |x|={np.max(np.abs(xs[active])):.6g} "
                    f"reaches radius {np.max(rad):.6g} >= R={R:.6g}"
                )
                break
    return (len(diagnostics) == 0, diagnostics)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def partition_to_json(p: LensTypePartition) -> str:
    payload: dict = {
        "schema": PARTITION_SCHEMA,
        "window_radius": p.window_radius,
        "chamber_samples": p.chamber_samples,
        "finite_chamber": p.finite_chamber.points.tolist(),
        "interface_left": p.interface_left.points.tolist(),
        "interface_right": p.interface_right.points.tolist(),
    }
    if p.triple is not None:
        g = p.triple
        payload["graphs"] = {
            "sigma": g.sigma,
            "mass": g.lens.mass,
            "xs_in": g.xs_in.tolist(),
            "g1": g.g1.tolist(),
            "g2": g.g2.tolist(),
            "xs_left": g.xs_left.tolist(),
            "g0_left": g.g0_left.tolist(),
            "xs_right": g.xs_right.tolist(),
            "g0_right": g.g0_right.tolist(),
        }
    return json.dumps(payload)


def partition_from_json(text: str) -> LensTypePartition:
    payload = json.loads(text)
    if payload.get("schema") != PARTITION_SCHEMA:
        raise ValidationError(f"unsupported partition schema: {payload.get('schema')!r}")
    if "graphs" in payload:
        g = payload["graphs"]
        triple = GraphTriple(
            sigma=float(g["sigma"]),
            lens=LensSpec.from_mass(float(g["mass"])),
            window_radius=float(payload["window_radius"]),
            xs_in=np.asarray(g["xs_in"], dtype=float),
            g1=np.asarray(g["g1"], dtype=float),
            g2=np.asarray(g["g2"], dtype=float),
            xs_left=np.asarray(g["xs_left"], dtype=float),
            g0_left=np.asarray(g["g0_left"], dtype=float),
            xs_right=np.asarray(g["xs_right"], dtype=float),
            g0_right=np.asarray(g["g0_right"], dtype=float),
        )
        return from_graphs(triple)
    chamber = Polygon(payload["finite_chamber"], validate=False)
    left = Polyline(payload["interface_left"], validate=False)
    right = Polyline(payload["interface_right"], validate=False)
    return _assemble_from_pieces(chamber, left, right, float(payload["window_radius"]),
                                 int(payload["chamber_samples"]))


def _assemble_from_pieces(
    chamber: Polygon,
    left: Polyline,
    right: Polyline,
    window_radius: float,
    chamber_samples: int,
) -> LensTypePartition:
    """Rebuild column envelopes from explicit chamber and interface curves."""
    pts = chamber.points
    i_min = int(np.argmin(pts[:, 0]))
    i_max = int(np.argmax(pts[:, 0]))
    lower, upper = _split_ring(pts, i_min, i_max)
    xs = np.concatenate([left.points[:, 0], lower[1:-1, 0], right.points[:, 0]])
    bot = np.concatenate([left.points[:, 1], lower[1:-1, 1], right.points[:, 1]])
    xs_t = np.concatenate([left.points[:, 0], upper[1:-1, 0], right.points[:, 0]])
    top = np.concatenate([left.points[:, 1], upper[1:-1, 1], right.points[:, 1]])
    if not np.array_equal(xs, xs_t):
        merged = np.union1d(xs, xs_t)
        bot = np.interp(merged, _strictify(xs), bot)
        top = np.interp(merged, _strictify(xs_t), top)
        xs = merged
    fld = ColumnField(xs=_strictify(xs), top=top, bot=bot)
    return LensTypePartition(
        finite_chamber=chamber,
        interface_left=left,
        interface_right=right,
        window_radius=window_radius,
        chamber_samples=chamber_samples,
        field=fld,
        triple=None,
    )


def _split_ring(pts: np.ndarray, i_min: int, i_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Split a CCW ring into lower (left-to-right) and upper chains."""
    n = len(pts)
    idx = np.arange(n)
    if i_min < i_max:
        lower_idx = idx[i_min : i_max + 1]
        upper_idx = np.concatenate([idx[i_max:], idx[: i_min + 1]])
    else:
        lower_idx = np.concatenate([idx[i_min:], idx[: i_max + 1]])
        upper_idx = idx[i_max : i_min + 1]
    lower = pts[lower_idx]
    upper = pts[upper_idx][::-1]
    return lower, upper
