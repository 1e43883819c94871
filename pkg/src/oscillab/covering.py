"""Boundary covering machinery for the n/log n lower bound.

A boundary point is "good" when both tilted chords through it are either
long (length at least r) or leave the domain entirely; at good points the
tilted-line derivative estimates apply directly.  Non-good points are
swallowed by short "elementary" arcs whose tangent direction turns by at
least phi = pi/2 - 2*theta.  A maximal disjoint family of elementary arcs,
padded on both sides, yields at most four covered components; the integral
case split then decides whether the derivative norm is driven by the good
part of the boundary or by oscillation inside the heaviest component.

Arc intervals are stored as (start_s, end_s) with end_s allowed past the
perimeter to express wrap-around; lengths are always positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .audits import AuditReport, h_set
from .errors import FamilyTooLarge, NoCutPoint
from .geometry import BoundaryPoint, ConvexDomain, chord
from .polynomials import (
    RootPolynomial,
    _adaptive_log_integral,
    _golden_max,
    log_abs,
    logabs_derivative,
    lq_norm,
)

__all__ = [
    "BoundaryArc",
    "Covering",
    "CoveringComponent",
    "CaseSplit",
    "RSchedule",
    "covering_tilt_angle",
    "wedge_angle",
    "good_point_test",
    "elementary_arcs",
    "maximal_disjoint_family",
    "build_covering",
    "r_schedule",
    "case_split",
    "max_feasible_r",
]


def covering_tilt_angle(K: ConvexDomain) -> float:
    """Default tilt for the covering construction: arcsin(w/d)/80."""
    return math.asin(K.width / K.diameter) / 80.0


def wedge_angle(theta: float) -> float:
    """phi = pi/2 - 2*theta, the minimum tangent turn along an elementary
    arc; lands in (2*pi/5, pi/2) for every admissible tilt."""
    return math.pi / 2.0 - 2.0 * theta


# ------------------------------------------------------------------ arcs

@dataclass(frozen=True)
class BoundaryArc:
    """Closed boundary arc from start_s to end_s (counterclockwise).

    kind is "elementary" (short arc between a non-good point and the far
    end of its short chord), "component" (a maximal covered arc), or
    "padding" (a flank added around a central elementary arc).  Violated
    construction bounds are flagged, never clipped.
    """

    start_s: float
    end_s: float
    kind: str
    var_alpha: float = 0.0
    length_ok: bool = True
    var_ok: bool = True

    def __post_init__(self):
        if self.end_s <= self.start_s:
            raise ValueError("arc must have positive length")
        if self.kind not in ("elementary", "component", "padding"):
            raise ValueError(f"unknown arc kind {self.kind!r}")

    @property
    def length(self) -> float:
        return self.end_s - self.start_s

    def contains_s(self, s: float, perimeter: float) -> bool:
        rel = (s - self.start_s) % perimeter
        return rel <= self.length or rel >= perimeter - 1e-12 * perimeter

    def as_record(self) -> dict:
        return {
            "start_s": self.start_s,
            "end_s": self.end_s,
            "length": self.length,
            "kind": self.kind,
            "var_alpha": self.var_alpha,
            "length_ok": self.length_ok,
            "var_ok": self.var_ok,
        }


def good_point_test(K: ConvexDomain, zeta: BoundaryPoint, r: float,
                    theta: float = None) -> bool:
    """True when each tilted chord through zeta (directions sigma +- 2
    theta) either has length at least r or misses the interior of K."""
    if r <= 0:
        raise ValueError("r must be positive")
    theta = covering_tilt_angle(K) if theta is None else theta
    sigma = zeta.sigma
    for sign in (-1.0, 1.0):
        c = chord(K, zeta.z, sigma + sign * 2.0 * theta)
        if c.hits_interior and c.delta < r:
            return False
    return True


def _short_chord(K, bp, r, theta):
    """The shorter interior-hitting tilted chord with length < r, if any."""
    best = None
    for sign in (-1.0, 1.0):
        c = chord(K, bp.z, bp.sigma + sign * 2.0 * theta)
        if c.hits_interior and c.delta < r:
            if best is None or c.delta < best.delta:
                best = c
    return best


def _arc_for_point(K, bp, r, theta, length_bound, phi):
    """Elementary arc for a non-good point: the short boundary arc between
    the point and the far end of its short tilted chord."""
    c = _short_chord(K, bp, r, theta)
    if c is None:
        return None
    L = K.perimeter
    s_far = K.nearest_boundary_s(c.D)
    fwd = (s_far - bp.s) % L
    if fwd == 0.0:
        return None
    if fwd <= L - fwd:
        start, length = bp.s % L, fwd
    else:
        start, length = s_far % L, L - fwd
    var = K.tangent_variation(start, start + length)
    return BoundaryArc(
        start, start + length, "elementary", var_alpha=var,
        length_ok=length <= length_bound * (1 + 1e-9),
        var_ok=var >= phi - 1e-9,
    )


def _detection_points(K, r, theta, mesh):
    """Sample parameters for locating non-good points: a uniform mesh plus
    multi-scale ladders around every vertex, where short tilted chords can
    hide at depths far below the mesh spacing."""
    L = K.perimeter
    phi = wedge_angle(theta)
    pts = {float(s) for s in np.linspace(0.0, L, mesh, endpoint=False)}
    if K.kind == "polygon":
        for i in range(len(K.vertices)):
            sv = float(K.vertex_s(i)) % L
            pts.add(sv)
            omega = K.vertex_point(i).omega
            hints = [r * f for f in (1e-3, 1e-2, 0.05, 0.2, 0.5, 1.0, 3.0)]
            if omega > phi:
                # depth of the short-chord zone next to a corner whose
                # turn exceeds the wedge angle
                depth = r * math.sin(omega - phi) / math.sin(omega)
                hints += [depth * f for f in (0.05, 0.25, 0.5, 0.75, 0.95)]
            for h in hints:
                pts.add((sv + h) % L)
                pts.add((sv - h) % L)
    return np.asarray(sorted(pts))


def elementary_arcs(K: ConvexDomain, r: float, theta: float = None,
                    mesh: int = 2048) -> tuple:
    """All distinct elementary arcs found from a detection mesh refined to
    1e-6 of the perimeter around good/non-good transitions."""
    if r <= 0:
        raise ValueError("r must be positive")
    theta = covering_tilt_angle(K) if theta is None else theta
    L = K.perimeter
    phi = wedge_angle(theta)
    length_bound = 4.0 * r * K.diameter / K.width

    ss = _detection_points(K, r, theta, mesh)
    good = np.array([good_point_test(K, K.boundary_point(s), r, theta)
                     for s in ss])
    bad_params = [float(s) for s, g in zip(ss, good) if not g]

    # localize each transition so arc families do not depend on the mesh
    resolution = 1e-6 * L
    for i in range(len(ss)):
        j = (i + 1) % len(ss)
        if good[i] == good[j]:
            continue
        a, b = float(ss[i]), float(ss[j]) + (L if j == 0 else 0.0)
        ga = good[i]
        while b - a > resolution:
            m = 0.5 * (a + b)
            gm = good_point_test(K, K.boundary_point(m % L), r, theta)
            if gm == ga:
                a = m
            else:
                b = m
        bad_params.append((a if not ga else b) % L)

    arcs = {}
    for s in sorted(bad_params):
        arc = _arc_for_point(K, K.boundary_point(s), r, theta,
                             length_bound, phi)
        if arc is None:
            continue
        key = (round(arc.start_s / L, 9), round(arc.end_s / L, 9))
        arcs.setdefault(key, arc)
    return tuple(sorted(arcs.values(), key=lambda a: (a.start_s, a.end_s)))


def _arcs_overlap(a: BoundaryArc, b: BoundaryArc, perimeter=None) -> bool:
    shifts = (0.0,) if perimeter is None else (-perimeter, 0.0, perimeter)
    for sh in shifts:
        if a.start_s <= b.end_s + sh and b.start_s + sh <= a.end_s:
            return True
    return False


def maximal_disjoint_family(arcs, perimeter: float = None) -> tuple:
    """Greedy maximal family of pairwise disjoint arcs, scanned from the
    parameter origin.  More than four disjoint short arcs is impossible
    (five tangent turns of phi > 2*pi would not fit) and raises."""
    chosen = []
    for arc in sorted(arcs, key=lambda a: (a.start_s, a.end_s)):
        if all(not _arcs_overlap(arc, c, perimeter) for c in chosen):
            chosen.append(arc)
    if len(chosen) > 4:
        raise FamilyTooLarge(
            f"{len(chosen)} pairwise disjoint short arcs found; at most "
            "four can exist, so the geometry or the mesh is inconsistent")
    for arc in arcs:
        if arc in chosen:
            continue
        if all(not _arcs_overlap(arc, c, perimeter) for c in chosen):
            raise FamilyTooLarge("greedy family is not maximal")
    return tuple(chosen)


# ------------------------------------------------------------- covering

@dataclass(frozen=True)
class CoveringComponent:
    """One maximal covered arc: a central elementary arc with padding
    flanks on both sides (flanks absorb any merged neighbours)."""

    arc: BoundaryArc
    central: BoundaryArc
    flank_minus: BoundaryArc
    flank_plus: BoundaryArc

    def as_record(self) -> dict:
        return {
            "arc": self.arc.as_record(),
            "central": self.central.as_record(),
            "flank_minus": self.flank_minus.as_record(),
            "flank_plus": self.flank_plus.as_record(),
        }


@dataclass(frozen=True)
class Covering:
    """Padded covering of all non-good boundary points.

    components hold at most four arcs; cut_point is a parameter outside
    every component, placed at the midpoint of the longest uncovered gap.
    checked_points counts the verification mesh.
    """

    components: tuple
    r: float
    theta: float
    cut_point: float
    perimeter: float
    checked_points: int = 0

    @property
    def k0(self) -> int:
        return len(self.components)

    @property
    def total_measure(self) -> float:
        return sum(c.arc.length for c in self.components)

    def contains_s(self, s: float) -> bool:
        return any(c.arc.contains_s(s, self.perimeter)
                   for c in self.components)

    def intervals(self) -> tuple:
        """Component supports as plain (lo, hi) pieces inside [0, L]."""
        pieces = []
        L = self.perimeter
        for c in self.components:
            lo = c.arc.start_s % L
            hi = lo + c.arc.length
            if hi <= L:
                pieces.append((lo, hi))
            else:
                pieces.append((lo, L))
                pieces.append((0.0, hi - L))
        return tuple(sorted(pieces))

    def as_record(self) -> dict:
        return {
            "r": self.r,
            "theta": self.theta,
            "cut_point": self.cut_point,
            "perimeter": self.perimeter,
            "k0": self.k0,
            "total_measure": self.total_measure,
            "checked_points": self.checked_points,
            "components": [c.as_record() for c in self.components],
        }


def _merge_padded(fam, pad, L):
    """Pad each family arc by pad on both sides and merge overlaps on the
    circle.  Returns (start, end, centrals) with centrals shifted into the
    merged frame; no merged run may swallow three padded arcs."""
    items = []
    for arc in fam:
        s = (arc.start_s - pad) % L
        items.append([s, s + arc.length + 2.0 * pad, [arc]])
    items.sort(key=lambda it: it[0])
    merged = [items[0]]
    for it in items[1:]:
        last = merged[-1]
        if it[0] <= last[1]:
            last[1] = max(last[1], it[1])
            last[2].extend(it[2])
        else:
            merged.append(it)
    if len(merged) > 1 and merged[-1][1] >= merged[0][0] + L:
        first = merged.pop(0)
        last = merged[-1]
        last[1] = max(last[1], first[1] + L)
        last[2].extend(first[2])
    for _, _, centrals in merged:
        assert len(centrals) <= 2, \
            "three padded arcs merged into one run; disjointness and the " \
            "length bound forbid such a chain"
    return merged


def _shift_into(arc, lo, hi, L):
    """Translate an arc by a multiple of L so it sits inside [lo, hi]."""
    k = math.floor((lo - arc.start_s) / L + 0.5)
    for off in (k, k + 1, k - 1):
        s = arc.start_s + off * L
        if s >= lo - 1e-9 * L and s + arc.length <= hi + 1e-9 * L:
            return BoundaryArc(s, s + arc.length, arc.kind,
                               arc.var_alpha, arc.length_ok, arc.var_ok)
    raise AssertionError("central arc does not fit its merged run")


def build_covering(K: ConvexDomain, r: float, theta: float = None,
                   mesh: int = 2048, verify_mesh: int = 2048) -> Covering:
    """Construct and verify the padded covering for chord threshold r.

    Requires 108*r*d/w < d.  Every verification mesh point must be good or
    inside a component; a failure is a construction bug and asserts.
    """
    theta = covering_tilt_angle(K) if theta is None else theta
    d, w, L = K.diameter, K.width, K.perimeter
    if 108.0 * r * d / w >= d:
        raise ValueError(
            f"r={r:.6g} too large for the covering: need 108*r*d/w < d, "
            f"i.e. r < {w / 108.0:.6g}")

    arcs = elementary_arcs(K, r, theta, mesh=mesh)
    fam = maximal_disjoint_family(arcs, perimeter=L)
    pad = 4.0 * r * d / w

    components = []
    if fam:
        merged = _merge_padded(fam, pad, L)
        for lo, hi, centrals in merged:
            ranked = sorted(centrals,
                            key=lambda a: (-a.var_alpha, a.start_s % L))
            central = _shift_into(ranked[0], lo, hi, L)
            var = K.tangent_variation(lo, hi)
            comp = BoundaryArc(lo, hi, "component", var_alpha=var)
            flank_m = BoundaryArc(lo, central.start_s, "padding")
            flank_p = BoundaryArc(central.end_s, hi, "padding")
            components.append(
                CoveringComponent(comp, central, flank_m, flank_p))
        components.sort(key=lambda c: c.arc.start_s % L)

    # cut point: midpoint of the longest gap left uncovered
    if not components:
        cut = 0.5 * L
    else:
        starts = [c.arc.start_s % L for c in components]
        ends = [(c.arc.start_s % L) + c.arc.length for c in components]
        gaps = []
        for i in range(len(components)):
            nxt = starts[(i + 1) % len(components)]
            gaps.append(((nxt - ends[i]) % L, ends[i]))
        gap, at = max(gaps)
        if gap <= 0:
            raise NoCutPoint(
                "padded arcs cover the whole boundary; decrease r")
        cut = (at + 0.5 * gap) % L

    cov = Covering(tuple(components), float(r), float(theta), cut, L)

    # verification: good and covered points must tile the whole boundary
    ver = set(float(s)
              for s in np.linspace(0.0, L, verify_mesh, endpoint=False))
    ver.update(float(s) for s in _detection_points(K, r, theta, 16))
    exceptions = [s for s in sorted(ver)
                  if not good_point_test(K, K.boundary_point(s), r, theta)
                  and not cov.contains_s(s)]
    assert not exceptions, \
        f"{len(exceptions)} boundary points neither good nor covered " \
        f"(first at s={exceptions[0]:.9g})"
    return Covering(tuple(components), float(r), float(theta), cut, L,
                    checked_points=len(ver))


def max_feasible_r(K: ConvexDomain, theta: float = None,
                   iters: int = 48) -> float:
    """Largest r (up to bisection accuracy) for which build_covering
    succeeds, scanning below the hard bound w/108."""
    theta = covering_tilt_angle(K) if theta is None else theta
    hi = K.width / 108.0
    lo = 0.0
    feasible = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        try:
            build_covering(K, mid, theta, mesh=512, verify_mesh=256)
        except (ValueError, NoCutPoint, FamilyTooLarge, AssertionError):
            hi = mid
        else:
            lo = mid
            feasible = mid
        if hi - lo <= 1e-12 * K.width:
            break
    return feasible


# ------------------------------------------------------------ schedules

@dataclass(frozen=True)
class RSchedule:
    """Chord threshold schedule r(n) = 300 (d^2/w) (log n / n) with the
    gates guarding the final n/log n inequality: the threshold cap r1, the
    theorem floor n0 for the degree, and the working floor n1."""

    r: float
    r1: float
    n0: float
    n1: float


def r_schedule(n, K: ConvexDomain) -> RSchedule:
    if n < 2:
        raise ValueError("degree must be at least 2 so log n > 0")
    d, w = K.diameter, K.width
    r = 300.0 * (d * d / w) * math.log(n) / n
    r1 = 1e-4 * w * w / d
    n0 = max(1e20, (d / w) ** 5)
    n1 = max(73.0, 6.0 * math.log(d / w))
    return RSchedule(r, r1, n0, n1)


# ----------------------------------------------------------- case split

@dataclass(frozen=True)
class CaseSplit:
    """Outcome of the integral dichotomy for one polynomial/covering pair.

    case is "I" when at most half the heavy-set mass sits inside the
    covering, else "II.1" (the heaviest component sees |p| vary by a
    factor two) or "II.2" (|p| is flat across it).  reports hold the
    inequality audits whose gates fired; detail records the integrals,
    the gates, and u, v.
    """

    case: str
    best_component: CoveringComponent | None
    u: float | None
    v: float | None
    reports: tuple
    detail: dict


def _intersect_pieces(a_pieces, b_pieces):
    out = []
    for a1, a2 in a_pieces:
        for b1, b2 in b_pieces:
            lo, hi = max(a1, b1), min(a2, b2)
            if hi > lo:
                out.append((lo, hi))
    return tuple(sorted(out))


def _arc_extrema(p, K, comp_arc, grid=4096):
    """(min, max) of log|p| over a component arc via a dense grid plus a
    golden-section polish around each candidate."""
    L = K.perimeter
    ss = np.linspace(comp_arc.start_s, comp_arc.end_s, grid)
    vals = log_abs(p, K.gamma(ss % L))
    step = (comp_arc.end_s - comp_arc.start_s) / (grid - 1)

    def f(s):
        return float(log_abs(p, complex(K.gamma(s % L))))

    i_max = int(np.argmax(vals))
    _, v_hi = _golden_max(f, float(ss[i_max]) - step, float(ss[i_max]) + step)
    i_min = int(np.argmin(vals))
    _, v_lo_neg = _golden_max(lambda s: -f(s),
                              float(ss[i_min]) - step,
                              float(ss[i_min]) + step)
    v_lo = -v_lo_neg
    return min(v_lo, float(np.min(vals))), max(v_hi, float(np.max(vals)))


def case_split(p: RootPolynomial, K: ConvexDomain, q: float,
               covering: Covering) -> CaseSplit:
    """Decide the integral dichotomy and audit the inequality chain that
    belongs to the active case, asserting each piece only when its gates
    (degree floor, chord-threshold schedule) actually hold."""
    if q == math.inf:
        raise ValueError("the case split integrates |p|^q; q must be finite")
    if q < 1:
        raise ValueError("q must be at least 1")
    n = p.n
    if n < 1:
        raise ValueError("constant polynomial has no oscillation factor")
    d, w, L = K.diameter, K.width, K.perimeter
    r = covering.r

    mp = p.monic()
    flog = lambda z: log_abs(mp, z)
    hs = h_set(mp, K, q, n=n)
    cov_pieces = covering.intervals()
    hl_pieces = _intersect_pieces(hs.intervals, cov_pieces)
    if hl_pieces:
        log_mass_hl, _ = _adaptive_log_integral(K, flog, q, 1e-8,
                                                seeds=list(hl_pieces))
    else:
        log_mass_hl = -math.inf
    log_mass_h = hs.log_mass_on_h
    log_mass_total = hs.log_mass_total
    log_p_norm = log_mass_total / q
    log_dp_norm = lq_norm(mp, K, q, derivative=True).log_value

    sched = r_schedule(n, K) if n >= 2 else None
    detail = {
        "q": q, "n": n, "r": r,
        "log_mass_total": log_mass_total,
        "log_mass_h": log_mass_h,
        "log_mass_h_covered": log_mass_hl,
        "log_p_norm": log_p_norm,
        "log_dp_norm": log_dp_norm,
    }
    reports = []

    case_one = (log_mass_hl == -math.inf
                or log_mass_hl <= math.log(0.5) + log_mass_h)
    if case_one:
        gate = (n >= 73 and sched is not None and r >= sched.r)
        detail["case_I_gate"] = gate
        if gate:
            # half the heavy mass sits on good points, where the tilted
            # estimate with the schedule's r keeps half its main term
            rhs = math.log(1e-4 * (w / (d * d)) * n) + log_p_norm
            reports.append(AuditReport(
                "case_I_chain", log_dp_norm, rhs,
                detail={"scale": "log", "r_schedule": sched.r}))
        return CaseSplit("I", None, None, None, tuple(reports), detail)

    # Case II: the covering holds most of the heavy mass
    best = None
    best_log = -math.inf
    comp_masses = []
    for compo in covering.components:
        pieces = []
        lo = compo.arc.start_s % L
        hi = lo + compo.arc.length
        if hi <= L:
            pieces.append((lo, hi))
        else:
            pieces.extend([(lo, L), (0.0, hi - L)])
        log_m, _ = _adaptive_log_integral(K, flog, q, 1e-8, seeds=pieces)
        comp_masses.append(log_m)
        if log_m > best_log:
            best, best_log = compo, log_m
    detail["component_log_masses"] = comp_masses
    assert best is not None, "case II with an empty covering"

    # the heaviest component carries at least 1/16 of the whole integral
    reports.append(AuditReport(
        "case_intA", best_log, math.log(1.0 / 16.0) + log_mass_total,
        detail={"scale": "log"}))

    log_u, log_v = _arc_extrema(mp, K, best.arc)
    u, v = math.exp(log_u) if log_u > -math.inf else 0.0, math.exp(log_v)
    detail["log_u"], detail["log_v"] = log_u, log_v

    mA = best.arc.length
    if 2.0 * u < v:
        # variation across the component forces a large derivative mass
        rhs = -math.log(2.0 * mA) + (math.log(1.0 / 16.0)
                                     + log_mass_total) / q
        reports.append(AuditReport(
            "case_2ulev", log_dp_norm, rhs, detail={"scale": "log"}))
        gate = (sched is not None
                and abs(r - sched.r) <= 1e-9 * max(r, sched.r))
        detail["schedule_gate"] = gate
        if gate:
            rhs_n = math.log((w * w / d ** 3) * n
                             / (240000.0 * math.log(n))) + log_p_norm
            reports.append(AuditReport(
                "case_2ulev_schedule", log_dp_norm, rhs_n,
                detail={"scale": "log"}))
        return CaseSplit("II.1", best, u, v, tuple(reports), detail)

    # flat component: two-point alternatives along the flanks take over
    s_gate = 24.0 * r * d / w <= w / 384.0 + 1e-12 * w
    n_gate = sched is not None and n >= sched.n1
    detail["flat_gates"] = {"span": s_gate, "degree": n_gate}
    if s_gate and n_gate:
        rhs = math.log((3.0 / (64.0 * 2.0 ** (7.0 / q)))
                       * (w / (d * d)) * n) + log_p_norm
        reports.append(AuditReport(
            "case_vle2u", log_dp_norm, rhs,
            detail={"scale": "log",
                    "weak_floor": math.log(3e-4 * (w / (d * d)) * n)
                    + log_p_norm}))
    return CaseSplit("II.2", best, u, v, tuple(reports), detail)
