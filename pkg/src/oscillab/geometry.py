"""Convex plane domains with an arc-length boundary parametrization.

Domains are either convex polygons (counterclockwise, strictly convex) or
disks. Points in the plane are complex numbers. The boundary is parametrized
by arc length s in [0, L), starting at vertex 0 (polygon) or at angle 0
(disk) and running counterclockwise.

The module computes the classical size quantities of a convex body (diameter,
minimal width, perimeter, depth), chords of lines through boundary points,
tangent direction intervals, and a handful of quantitative facts about how a
short boundary chord cuts the domain (triangle containment, angle and arc
bounds, which side of a tilted chord is the small one). It also estimates the
transfinite diameter by optimizing point configurations on the boundary.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateTangent, NoIntersection

TWO_PI = 2.0 * math.pi

# Geometric predicates (containment, interior hits, vertex snapping) use an
# absolute tolerance of GEOM_REL_TOL * diameter.
GEOM_REL_TOL = 1e-12

# Inequality margins pass at relative tolerance 1e-9 throughout the package.
MARGIN_REL_TOL = 1e-9


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def margin_tol(lhs: float, rhs: float) -> float:
    """Tolerance for the inequality lhs >= rhs: 1e-9 * (|lhs| + |rhs|)."""
    return MARGIN_REL_TOL * (abs(lhs) + abs(rhs))


@dataclass(frozen=True)
class BoundaryPoint:
    """A boundary point with its arc parameter and tangent direction data.

    alpha_minus and alpha_plus are the one-sided tangent direction angles in
    a lifting that increases by 2*pi per counterclockwise loop. They agree
    except at polygon vertices, where the boundary turns by
    omega = alpha_plus - alpha_minus > 0.
    """

    s: float
    z: complex
    alpha_minus: float
    alpha_plus: float

    @property
    def omega(self) -> float:
        return self.alpha_plus - self.alpha_minus

    @property
    def alpha(self) -> float:
        """Default tangent direction choice: midpoint of the interval."""
        return 0.5 * (self.alpha_minus + self.alpha_plus)

    @property
    def sigma(self) -> float:
        """Inner normal angle for the default tangent choice."""
        return self.alpha + 0.5 * math.pi

    def supporting_directions(self, count: int) -> list[float]:
        """Tangent angle choices spread over [alpha_minus, alpha_plus].

        At a smooth point this is just the single tangent direction. At a
        vertex the directions are spread slightly inside the interval so
        every returned choice is a genuine supporting line.
        """
        if self.omega <= 1e-15 or count <= 1:
            return [self.alpha]
        pad = min(1e-6, 0.01 * self.omega)
        lo = self.alpha_minus + pad
        hi = self.alpha_plus - pad
        return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


@dataclass(frozen=True)
class Chord:
    """Intersection of the full line zeta + e^{i phi} R with the domain.

    delta is the length of the intersection segment (0 when the line only
    touches the boundary or misses it). D is the endpoint of the segment
    farther from zeta. hits_interior records whether the open segment meets
    the interior of the domain; a supporting line that contains a whole edge
    has delta > 0 but hits_interior False.
    """

    zeta: complex
    phi: float
    delta: float
    D: complex
    t_lo: float
    t_hi: float
    hits_interior: bool


class ConvexDomain:
    """A compact convex domain: counterclockwise polygon or disk."""

    def __init__(self, kind: str, vertices: Sequence[complex] | None = None,
                 center: complex | None = None, radius: float | None = None):
        self.kind = kind
        if kind == "polygon":
            if vertices is None or len(vertices) < 3:
                raise ValueError("polygon needs at least 3 vertices")
            self.vertices = tuple(complex(v) for v in vertices)
            self.center = None
            self.radius = None
            self._init_polygon()
        elif kind == "disk":
            if center is None or radius is None or not radius > 0:
                raise ValueError("disk needs a center and a positive radius")
            self.vertices = None
            self.center = complex(center)
            self.radius = float(radius)
            self._init_disk()
        else:
            raise ValueError(f"unknown domain kind {kind!r}")

    # ------------------------------------------------------------------
    # construction helpers

    @classmethod
    def polygon(cls, vertices: Iterable[complex]) -> "ConvexDomain":
        return cls("polygon", vertices=list(vertices))

    @classmethod
    def disk(cls, center: complex = 0j, radius: float = 1.0) -> "ConvexDomain":
        return cls("disk", center=center, radius=radius)

    @classmethod
    def unit_disk(cls) -> "ConvexDomain":
        return cls.disk(0j, 1.0)

    @classmethod
    def unit_square(cls) -> "ConvexDomain":
        return cls.polygon([0j, 1 + 0j, 1 + 1j, 1j])

    @classmethod
    def regular_polygon(cls, sides: int, circumradius: float = 1.0,
                        center: complex = 0j) -> "ConvexDomain":
        vs = [center + circumradius * np.exp(2j * math.pi * k / sides)
              for k in range(sides)]
        return cls.polygon([complex(v) for v in vs])

    @classmethod
    def from_json(cls, data: dict | str) -> "ConvexDomain":
        if isinstance(data, str):
            data = json.loads(data)
        kind = data.get("kind")
        if kind == "polygon":
            verts = [complex(x, y) for x, y in data["vertices"]]
            return cls.polygon(verts)
        if kind == "disk":
            cx, cy = data["center"]
            return cls.disk(complex(cx, cy), float(data["radius"]))
        raise ValueError(f"unknown domain kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "polygon":
            return {"kind": "polygon",
                    "vertices": [[v.real, v.imag] for v in self.vertices]}
        return {"kind": "disk",
                "center": [self.center.real, self.center.imag],
                "radius": self.radius}

    # ------------------------------------------------------------------
    # cached structure

    def _init_polygon(self) -> None:
        vs = self.vertices
        n = len(vs)
        scale = max(abs(a - b) for a in vs for b in vs)
        if scale <= 0:
            raise ValueError("polygon vertices coincide")
        area2 = sum(_cross(vs[i], vs[(i + 1) % n]) for i in range(n))
        if area2 < 0:
            raise ValueError("polygon vertices are clockwise, expected "
                             "counterclockwise order")
        edges = [vs[(i + 1) % n] - vs[i] for i in range(n)]
        for i in range(n):
            c = _cross(edges[i - 1], edges[i])
            if c <= GEOM_REL_TOL * scale * scale:
                raise ValueError(
                    f"polygon is not strictly convex at vertex {i} "
                    f"({vs[i].real:.6g}, {vs[i].imag:.6g})")
        lens = [abs(e) for e in edges]
        self._edge_dir = [e / l for e, l in zip(edges, lens)]
        self._edge_len = lens
        cum = [0.0]
        for l in lens:
            cum.append(cum[-1] + l)
        self._cum = cum
        self.perimeter = cum[-1]
        # lifted tangent angles: base[i] is the direction angle of edge i,
        # lifted so that base is increasing and base[0] in (-pi, pi]
        base = [math.atan2(self._edge_dir[0].imag, self._edge_dir[0].real)]
        turns = [0.0] * n
        for i in range(1, n):
            raw = math.atan2(self._edge_dir[i].imag, self._edge_dir[i].real)
            t = (raw - math.atan2(self._edge_dir[i - 1].imag,
                                  self._edge_dir[i - 1].real)) % TWO_PI
            turns[i] = t
            base.append(base[-1] + t)
        turns[0] = TWO_PI - sum(turns[1:])
        self._edge_angle = base
        self._turn = turns
        self.diameter = max(abs(a - b) for a in vs for b in vs)
        # minimal width is attained flush to an edge: distance of the
        # farthest vertex from each edge line, minimized over edges
        widths = [max(_cross(self._edge_dir[i], v - vs[i]) for v in vs)
                  for i in range(n)]
        self.width = min(widths)
        self._depth = None

    def _init_disk(self) -> None:
        self.perimeter = TWO_PI * self.radius
        self.diameter = 2.0 * self.radius
        self.width = 2.0 * self.radius
        self._depth = 2.0 * self.radius

    # short aliases used in formulas
    @property
    def d(self) -> float:
        return self.diameter

    @property
    def w(self) -> float:
        return self.width

    @property
    def L(self) -> float:
        return self.perimeter

    @property
    def tol(self) -> float:
        return GEOM_REL_TOL * self.diameter

    def __repr__(self) -> str:
        if self.kind == "polygon":
            return f"ConvexDomain(polygon, {len(self.vertices)} vertices)"
        return f"ConvexDomain(disk, c={self.center}, R={self.radius})"

    # ------------------------------------------------------------------
    # boundary parametrization

    def gamma(self, s):
        """Boundary point(s) at arc parameter s, vectorized over arrays."""
        if self.kind == "disk":
            s = np.asarray(s, dtype=float)
            out = self.center + self.radius * np.exp(1j * s / self.radius)
            return complex(out) if out.ndim == 0 else out
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        idx = np.clip(np.searchsorted(self._cum, s, side="right") - 1,
                      0, len(self._edge_len) - 1)
        off = s - np.asarray(self._cum)[idx]
        verts = np.asarray(self.vertices)
        dirs = np.asarray(self._edge_dir)
        out = verts[idx] + off * dirs[idx]
        return complex(out) if out.ndim == 0 else out

    def vertex_s(self, i: int) -> float:
        """Arc parameter of vertex i (polygon only)."""
        return self._cum[i]

    def boundary_point(self, s: float) -> BoundaryPoint:
        """Boundary point with one-sided tangent angles at arc parameter s.

        s within 1e-9 * L of a polygon vertex snaps to the vertex.
        """
        L = self.perimeter
        s = float(s) % L
        if self.kind == "disk":
            a = s / self.radius + 0.5 * math.pi
            return BoundaryPoint(s, self.gamma(s), a, a)
        snap = 1e-9 * L
        n = len(self.vertices)
        i = min(bisect.bisect_right(self._cum, s) - 1, n - 1)
        off = s - self._cum[i]
        if off <= snap or self._edge_len[i] - off <= snap:
            j = i if off <= snap else (i + 1) % n
            sj = self._cum[j] if j < n else 0.0
            a_plus = self._edge_angle[j]
            a_minus = a_plus - self._turn[j]
            return BoundaryPoint(sj % L, self.vertices[j], a_minus, a_plus)
        a = self._edge_angle[i]
        return BoundaryPoint(s, self.gamma(s), a, a)

    def vertex_point(self, i: int) -> BoundaryPoint:
        return self.boundary_point(self._cum[i % len(self.vertices)])

    def tangent_variation(self, s_start: float, s_end: float) -> float:
        """Total turning of the tangent along the ccw arc from s_start to
        s_end, endpoints included: alpha_plus(end) - alpha_minus(start)."""
        L = self.perimeter
        length = (s_end - s_start) % L
        if self.kind == "disk":
            return length / self.radius
        s0 = s_start % L
        tol = 1e-9 * L
        var = 0.0
        for j, sv in enumerate(self._cum[:-1]):
            rel = (sv - s0) % L
            if rel <= length + tol or rel >= L - tol:
                var += self._turn[j]
        return var

    # ------------------------------------------------------------------
    # membership and projection

    def interior_margin(self, z) -> float | np.ndarray:
        """Signed distance to the boundary, positive inside (vectorized).

        For polygons this is the minimum over edges of the signed distance
        to the edge lines. Inside the domain that equals the distance to the
        boundary; outside it underestimates near corners, which is fine for
        the membership tests it backs.
        """
        if self.kind == "disk":
            z = np.asarray(z, dtype=complex)
            out = self.radius - np.abs(z - self.center)
            return float(out) if out.ndim == 0 else out
        z = np.asarray(z, dtype=complex)
        verts = np.asarray(self.vertices)
        dirs = np.asarray(self._edge_dir)
        rel = z[..., None] - verts
        crossv = dirs.real * rel.imag - dirs.imag * rel.real
        out = crossv.min(axis=-1)
        return float(out) if out.ndim == 0 else out

    def contains(self, z, tol: float | None = None):
        tol = self.tol if tol is None else tol
        m = self.interior_margin(z)
        return m >= -tol

    def nearest_boundary_s(self, z: complex) -> float:
        """Arc parameter of the boundary point nearest to z."""
        if self.kind == "disk":
            ang = math.atan2((z - self.center).imag, (z - self.center).real)
            return (ang % TWO_PI) * self.radius
        best = (math.inf, 0.0)
        for i, (a, dirv, elen) in enumerate(
                zip(self.vertices, self._edge_dir, self._edge_len)):
            t = (z - a).real * dirv.real + (z - a).imag * dirv.imag
            t = min(max(t, 0.0), elen)
            p = a + t * dirv
            dist = abs(z - p)
            if dist < best[0]:
                best = (dist, self._cum[i] + t)
        return best[1] % self.perimeter

    def area(self) -> float:
        if self.kind == "disk":
            return math.pi * self.radius ** 2
        vs = self.vertices
        return 0.5 * sum(_cross(vs[i], vs[(i + 1) % len(vs)])
                         for i in range(len(vs)))

    def as_clip_polygon(self, resolution: int = 1024) -> list[complex]:
        """Vertex list used for clipping and area sampling.

        Disks are replaced by an inscribed regular polygon, which slightly
        under-covers the disk near the arc; samples drawn from it are still
        genuine domain points.
        """
        if self.kind == "polygon":
            return list(self.vertices)
        return [self.center + self.radius * complex(math.cos(t), math.sin(t))
                for t in np.linspace(0.0, TWO_PI, resolution, endpoint=False)]

    def sample_uniform(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform samples from the domain (disk exact, polygon exact)."""
        if self.kind == "disk":
            r = self.radius * np.sqrt(rng.uniform(size=count))
            t = rng.uniform(0.0, TWO_PI, size=count)
            return self.center + r * np.exp(1j * t)
        return sample_polygon_uniform(list(self.vertices), count, rng)

    # ------------------------------------------------------------------
    # depth

    def depth(self) -> float:
        """Largest h such that every boundary point has a normal line whose
        chord through the domain is at least h long.

        A disk gives 2R. For a polygon the minimum over the boundary of the
        best normal chord is attained in the limit toward a vertex along an
        adjacent edge (the chord length in a fixed direction is concave along
        each edge), so it suffices to evaluate, at every vertex, the chord in
        the inner normal direction of each adjacent edge. Domains with an
        acute enough corner get depth 0.
        """
        if self._depth is not None:
            return self._depth
        n = len(self.vertices)
        h = math.inf
        for j in range(n):
            v = self.vertices[j]
            for e in (j, (j - 1) % n):
                sigma = self._edge_angle_raw(e) + 0.5 * math.pi
                h = min(h, chord(self, v, sigma).delta)
        self._depth = max(h, 0.0)
        return self._depth

    def _edge_angle_raw(self, i: int) -> float:
        d = self._edge_dir[i]
        return math.atan2(d.imag, d.real)


# ----------------------------------------------------------------------
# plain-geometry helpers shared by the ops below


def sample_polygon_uniform(verts: list[complex], count: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from a convex polygon via fan triangulation."""
    v0 = verts[0]
    tris = [(v0, verts[i], verts[i + 1]) for i in range(1, len(verts) - 1)]
    areas = np.array([abs(_cross(b - a, c - a)) * 0.5 for a, b, c in tris])
    total = areas.sum()
    if total <= 0:
        return np.full(count, v0, dtype=complex)
    pick = rng.choice(len(tris), size=count, p=areas / total)
    u = rng.uniform(size=count)
    v = rng.uniform(size=count)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    a = np.array([tris[k][0] for k in pick])
    b = np.array([tris[k][1] for k in pick])
    c = np.array([tris[k][2] for k in pick])
    return a + u * (b - a) + v * (c - a)


def clip_polygon_halfplane(verts: Sequence[complex], point: complex,
                           inward: complex,
                           tol: float = 0.0) -> list[complex]:
    """Clip a convex polygon to the halfplane {z: <z - point, inward> >= 0}.

    inward is a (not necessarily unit) normal pointing into the kept side.
    """
    def val(z: complex) -> float:
        return (z - point).real * inward.real + (z - point).imag * inward.imag

    out: list[complex] = []
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        va, vb = val(a), val(b)
        if va >= -tol:
            out.append(a)
        if (va > tol and vb < -tol) or (va < -tol and vb > tol):
            t = va / (va - vb)
            out.append(a + t * (b - a))
    return out


def polygon_diameter(verts: Sequence[complex]) -> float:
    if len(verts) < 2:
        return 0.0
    arr = np.asarray(verts, dtype=complex)
    return float(np.abs(arr[:, None] - arr[None, :]).max())


# ----------------------------------------------------------------------
# chords


def chord(K: ConvexDomain, zeta, phi: float) -> Chord:
    """Chord of the full line through zeta with direction angle phi.

    zeta may be a BoundaryPoint or a complex point (not required to lie on
    the boundary; the chord of the line is well defined regardless). The
    result satisfies chord(K, z, phi).delta == chord(K, z, phi + pi).delta.
    """
    z0 = zeta.z if isinstance(zeta, BoundaryPoint) else complex(zeta)
    u = complex(math.cos(phi), math.sin(phi))
    tol = K.tol
    if K.kind == "disk":
        b = (z0 - K.center).real * u.real + (z0 - K.center).imag * u.imag
        c = abs(z0 - K.center) ** 2 - K.radius ** 2
        disc = b * b - c
        if disc <= 0.0:
            return Chord(z0, phi, 0.0, z0, 0.0, 0.0, False)
        r = math.sqrt(disc)
        t_lo, t_hi = -b - r, -b + r
    else:
        t_lo, t_hi = -math.inf, math.inf
        for a, dirv in zip(K.vertices, K._edge_dir):
            c0 = _cross(dirv, z0 - a)
            c1 = _cross(dirv, u)
            if abs(c1) <= 1e-15:
                if c0 < -tol:
                    return Chord(z0, phi, 0.0, z0, 0.0, 0.0, False)
                continue
            t = -c0 / c1
            if c1 > 0.0:
                t_lo = max(t_lo, t)
            else:
                t_hi = min(t_hi, t)
        if not (t_hi - t_lo > 0.0) or math.isinf(t_lo) or math.isinf(t_hi):
            return Chord(z0, phi, 0.0, z0, 0.0, 0.0, False)
    delta = t_hi - t_lo
    if delta <= tol:
        return Chord(z0, phi, 0.0, z0, t_lo, t_hi, False)
    far = t_hi if abs(t_hi) >= abs(t_lo) else t_lo
    D = z0 + far * u
    mid = z0 + 0.5 * (t_lo + t_hi) * u
    hits = bool(K.interior_margin(mid) > tol)
    return Chord(z0, phi, float(delta), D, float(t_lo), float(t_hi), hits)


def tangent_interval(K: ConvexDomain, s: float) -> BoundaryPoint:
    """Boundary point at s together with its tangent angle interval."""
    return K.boundary_point(s)


# ----------------------------------------------------------------------
# quantitative convexity facts


@dataclass(frozen=True)
class TriangleContainmentReport:
    applicable: bool
    reason: str
    samples: int
    violations: int
    min_margin: float
    T: complex | None


def triangle_containment_check(K: ConvexDomain, zeta, zeta_prime,
                               phi_t: float, phi_t_prime: float,
                               samples: int = 10000,
                               rng: np.random.Generator | None = None
                               ) -> TriangleContainmentReport:
    """Check that the part of K beyond the chord [zeta, zeta'] fits in the
    triangle (zeta, T, zeta'), where T is the crossing of the two supporting
    half-lines from zeta and zeta'.

    phi_t and phi_t_prime are direction angles of the half-lines (rays). The
    rays must not re-enter the interior of K. Returns a sampling report; a
    negative min_margin beyond tolerance counts as a violation.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    z1 = zeta.z if isinstance(zeta, BoundaryPoint) else complex(zeta)
    z2 = zeta_prime.z if isinstance(zeta_prime, BoundaryPoint) else complex(zeta_prime)
    tol = K.tol
    for z0, phi in ((z1, phi_t), (z2, phi_t_prime)):
        ch = chord(K, z0, phi)
        if ch.hits_interior and ch.t_hi > tol:
            seg_lo = max(ch.t_lo, 0.0)
            if ch.t_hi - seg_lo > tol:
                mid = z0 + 0.5 * (seg_lo + ch.t_hi) * complex(math.cos(phi),
                                                              math.sin(phi))
                if K.interior_margin(mid) > tol:
                    raise ValueError("half-line enters the interior, not a "
                                     "supporting ray")
    u1 = complex(math.cos(phi_t), math.sin(phi_t))
    u2 = complex(math.cos(phi_t_prime), math.sin(phi_t_prime))
    den = _cross(u1, u2)
    if abs(den) <= 1e-14:
        return TriangleContainmentReport(False, "rays parallel", 0, 0,
                                         math.nan, None)
    rel = z2 - z1
    a = _cross(rel, u2) / den
    b = _cross(rel, u1) / den
    if a < -tol or b < -tol:
        return TriangleContainmentReport(False, "rays do not cross", 0, 0,
                                         math.nan, None)
    T = z1 + a * u1
    cell = z2 - z1
    side_T = _cross(cell, T - z1)
    if abs(side_T) <= tol * max(abs(cell), 1.0):
        return TriangleContainmentReport(False, "T on the chord line", 0, 0,
                                         math.nan, T)
    inward = 1j * cell if side_T > 0 else -1j * cell
    clipped = clip_polygon_halfplane(K.as_clip_polygon(), z1, inward, tol=0.0)
    if len(clipped) < 3:
        return TriangleContainmentReport(True, "empty far side", 0, 0,
                                         math.inf, T)
    pts = sample_polygon_uniform(clipped, samples, rng)
    tri = (z1, T, z2)
    orient = _cross(tri[1] - tri[0], tri[2] - tri[0])
    if orient < 0:
        tri = (z2, T, z1)
    margins = np.full(samples, math.inf)
    for i in range(3):
        aa, bb = tri[i], tri[(i + 1) % 3]
        e = bb - aa
        elen = abs(e)
        if elen <= tol:
            continue
        m = (e.real * (pts.imag - aa.imag) - e.imag * (pts.real - aa.real)) / elen
        margins = np.minimum(margins, m)
    bad = int((margins < -tol).sum())
    return TriangleContainmentReport(True, "", samples, bad,
                                     float(margins.min()), T)


@dataclass(frozen=True)
class AngleDiamArcReport:
    s: float
    beta: float
    beta_floor: float
    diam_small: float
    diam_bound: float
    arc_small: float
    arc_bound: float
    T: complex

    @property
    def margins(self) -> dict[str, float]:
        return {
            "beta": self.beta - self.beta_floor,
            "diam": self.diam_bound - self.diam_small,
            "arc": self.arc_bound - self.arc_small,
        }

    @property
    def passed(self) -> bool:
        checks = [
            (self.beta, self.beta_floor),
            (self.diam_bound, self.diam_small),
            (self.arc_bound, self.arc_small),
        ]
        return all(hi - lo >= -margin_tol(hi, lo) for hi, lo in checks)


def angle_diam_arc_bounds(K: ConvexDomain, zeta: BoundaryPoint,
                          zeta_prime: BoundaryPoint,
                          alpha: float | None = None,
                          alpha_prime: float | None = None
                          ) -> AngleDiamArcReport:
    """Quantify how flat the domain is near a short boundary chord.

    For boundary points at distance s with 0 < s < w, the supporting lines
    chosen at them meet at T with angle beta >= arcsin((w - s)/d), and the
    side of the chord line containing T satisfies
    diam <= s d/(w - s) and boundary arc length <= 2 s d/(w - s).
    """
    z1, z2 = zeta.z, zeta_prime.z
    s = abs(z2 - z1)
    w, d = K.width, K.diameter
    if not (0.0 < s < w):
        raise ValueError(f"need 0 < s < w, got s={s:.6g}, w={w:.6g}")
    a1 = zeta.alpha if alpha is None else float(alpha)
    a2 = zeta_prime.alpha if alpha_prime is None else float(alpha_prime)
    u1 = complex(math.cos(a1), math.sin(a1))
    u2 = complex(math.cos(a2), math.sin(a2))
    cell = z2 - z1
    if abs(_cross(u1, cell)) <= K.tol or abs(_cross(u2, cell)) <= K.tol:
        raise DegenerateTangent("supporting line runs along the chord")
    den = _cross(u1, u2)
    if abs(den) <= 1e-14:
        raise NoIntersection("supporting lines are parallel")
    a = _cross(cell, u2) / den
    T = z1 + a * u1
    side_T = _cross(cell, T - z1)
    if abs(side_T) <= K.tol * max(abs(cell), 1.0):
        raise DegenerateTangent("crossing point lies on the chord line")
    beta = abs(math.remainder(math.atan2((z1 - T).imag, (z1 - T).real)
                              - math.atan2((z2 - T).imag, (z2 - T).real),
                              TWO_PI))
    inward = 1j * cell if side_T > 0 else -1j * cell
    if K.kind == "polygon":
        small = clip_polygon_halfplane(list(K.vertices), z1, inward, tol=0.0)
        diam_small = polygon_diameter(small)
        arc_small = _polygon_boundary_in_halfplane(K, z1, inward)
    else:
        nu = inward / abs(inward)
        g = ((K.center - z1).real * nu.real + (K.center - z1).imag * nu.imag)
        psi = math.acos(max(-1.0, min(1.0, -g / K.radius)))
        arc_small = 2.0 * psi * K.radius
        diam_small = 2.0 * K.radius * math.sin(psi) if 2.0 * psi <= math.pi \
            else 2.0 * K.radius
    return AngleDiamArcReport(
        s=s,
        beta=beta,
        beta_floor=math.asin(max(-1.0, min(1.0, (w - s) / d))),
        diam_small=diam_small,
        diam_bound=s * d / (w - s),
        arc_small=arc_small,
        arc_bound=2.0 * s * d / (w - s),
        T=T,
    )


def _polygon_boundary_in_halfplane(K: ConvexDomain, point: complex,
                                   inward: complex) -> float:
    """Length of the polygon boundary inside {<z - point, inward> >= 0}."""
    def val(z: complex) -> float:
        return (z - point).real * inward.real + (z - point).imag * inward.imag

    total = 0.0
    n = len(K.vertices)
    for i in range(n):
        a, b = K.vertices[i], K.vertices[(i + 1) % n]
        va, vb = val(a), val(b)
        if va >= 0.0 and vb >= 0.0:
            total += abs(b - a)
        elif va >= 0.0 or vb >= 0.0:
            t = va / (va - vb)
            if va >= 0.0:
                total += abs(b - a) * t
            else:
                total += abs(b - a) * (1.0 - t)
    return total


@dataclass(frozen=True)
class TiltedSideReport:
    applicable: bool
    reason: str
    delta_minus: float
    delta_plus: float
    small_side: str | None
    sector: tuple[float, float] | None


def tilted_side_classification(K: ConvexDomain, zeta: BoundaryPoint,
                               phi: float,
                               sigma: float | None = None) -> TiltedSideReport:
    """Decide which side of a tilted chord through zeta is the small one.

    The two chords leave zeta at angles sigma -+ phi from zero, where sigma
    is the inner normal angle. When both chords are positive and shorter
    than the width, the small part of the domain cut off by the shorter
    chord lies in the angular sector between that chord and the tangent ray
    on its side. Returns the sector of directions (at zeta) containing the
    small part.
    """
    sigma = zeta.sigma if sigma is None else float(sigma)
    ch_minus = chord(K, zeta, sigma - phi)
    ch_plus = chord(K, zeta, sigma + phi)
    dm, dp = ch_minus.delta, ch_plus.delta
    w = K.width
    if min(dm, dp) <= K.tol:
        return TiltedSideReport(False, "min chord zero", dm, dp, None, None)
    if max(dm, dp) >= w:
        return TiltedSideReport(False, "chord at least the width", dm, dp,
                                None, None)
    if dm <= dp:
        sector = (sigma - 0.5 * math.pi, sigma - phi)
        side = "minus"
    else:
        sector = (sigma + phi, sigma + 0.5 * math.pi)
        side = "plus"
    return TiltedSideReport(True, "", dm, dp, side, sector)


# ----------------------------------------------------------------------
# transfinite diameter


@dataclass(frozen=True)
class TransfiniteEstimate:
    m: int
    fekete_estimate: float
    lower: float
    upper: float
    points_s: tuple[float, ...]


def transfinite_diameter_estimate(K: ConvexDomain, m: int,
                                  restarts: int = 3) -> TransfiniteEstimate:
    """Estimate the transfinite diameter by a Fekete point configuration.

    Maximizes the geometric mean of pairwise distances of m boundary points
    over arc parameters, by cyclic coordinate pattern search from equally
    spaced starts. The reported estimate is the m-point geometric mean at
    the best configuration found; it decreases toward the transfinite
    diameter as m grows and always sits above it. The bracket [d/4, d/2]
    holds for the limit; finite-m estimates can exceed d/2 for small m.
    """
    if m < 2:
        raise ValueError("need at least 2 points")
    L = K.perimeter
    best_val = -math.inf
    best_s: np.ndarray | None = None
    offsets = [0.0, L / (2 * m), L * 0.381966 / m][:max(1, restarts)]
    for off in offsets:
        s = (np.arange(m) * L / m + off) % L
        val, s = _fekete_pattern_search(K, s)
        if val > best_val:
            best_val, best_s = val, s
    pairs = m * (m - 1) / 2
    est = math.exp(best_val / pairs)
    return TransfiniteEstimate(m, est, K.diameter / 4.0, K.diameter / 2.0,
                               tuple(float(x) for x in best_s))


def _fekete_pattern_search(K: ConvexDomain, s: np.ndarray
                           ) -> tuple[float, np.ndarray]:
    L = K.perimeter
    m = len(s)
    z = np.asarray(K.gamma(s))

    def pairlog(zz: np.ndarray) -> float:
        dif = np.abs(zz[:, None] - zz[None, :])
        iu = np.triu_indices(m, 1)
        vals = dif[iu]
        if np.any(vals <= 0.0):
            return -math.inf
        return float(np.log(vals).sum())

    def row_contrib(zz: np.ndarray, i: int, zi: complex) -> float:
        dist = np.abs(np.delete(zz, i) - zi)
        if np.any(dist <= 0.0):
            return -math.inf
        return float(np.log(dist).sum())

    total = pairlog(z)
    h = L / (2.0 * m)
    while h > 1e-9 * L:
        improved = False
        for i in range(m):
            cur = row_contrib(z, i, z[i])
            for cand_s in ((s[i] + h) % L, (s[i] - h) % L):
                zi = K.gamma(cand_s)
                new = row_contrib(z, i, zi)
                if new > cur + 1e-15:
                    total += new - cur
                    s[i] = cand_s
                    z[i] = zi
                    cur = new
                    improved = True
        if not improved:
            h *= 0.5
    return pairlog(z), s
