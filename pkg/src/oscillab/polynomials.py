"""Polynomials given by their roots, evaluated in log space, with boundary
L^q norms and the oscillation factor M_q = |p'|_q / |p|_q.

Everything works at degrees in the thousands: absolute values go through
sums of logs, derivatives through the logarithmic derivative, and norms
through shifted exponentials, so nothing overflows before the final
exponentiation (which may legitimately return inf while M stays finite).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularPoint, ZeroNorm
from .geometry import ConvexDomain

# max pairwise (point, root) entries handled per block
_BLOCK = 1 << 21

# 16-node Gauss-Legendre rule on [-1, 1]
_XG, _WG = np.polynomial.legendre.leggauss(16)

# threshold (relative to the root spread) below which a point counts as
# sitting on a root
_NEAR_ROOT = 1e-12
_SINGULAR = 1e-14


@dataclass(frozen=True)
class RootPolynomial:
    """p(z) = lead * prod (z - root_j).  Degree n = len(roots); n = 0 is a
    constant."""

    lead: complex
    roots: tuple

    def __post_init__(self):
        object.__setattr__(self, "roots",
                           tuple(complex(r) for r in self.roots))
        object.__setattr__(self, "lead", complex(self.lead))

    @property
    def n(self) -> int:
        return len(self.roots)

    def scale(self) -> float:
        if not self.roots:
            return 1.0
        return max(1.0, max(abs(r) for r in self.roots))

    def monic(self) -> "RootPolynomial":
        return RootPolynomial(1.0, self.roots)

    def to_json(self) -> str:
        return json.dumps({
            "lead": [self.lead.real, self.lead.imag],
            "roots": [[r.real, r.imag] for r in self.roots],
        })

    @classmethod
    def from_json(cls, text: str) -> "RootPolynomial":
        obj = json.loads(text)
        return cls(complex(*obj["lead"]),
                   tuple(complex(*r) for r in obj["roots"]))


def _as_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _root_blocks(n_points: int, n_roots: int) -> int:
    per = max(1, _BLOCK // max(1, n_points))
    return max(1, math.ceil(n_roots / per))


def log_abs(p: RootPolynomial, z) -> np.ndarray:
    """log |p(z)|, elementwise; -inf exactly on a root."""
    arr, scalar = _as_array(z)
    flat = arr.ravel()
    out = np.full(flat.shape, math.log(abs(p.lead)) if p.lead != 0
                  else -math.inf)
    if p.roots and p.lead != 0:
        roots = np.asarray(p.roots)
        nb = _root_blocks(flat.size, roots.size)
        for blk in np.array_split(roots, nb):
            d = np.abs(flat[:, None] - blk[None, :])
            with np.errstate(divide="ignore"):
                out += np.log(d).sum(axis=1)
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def log_evaluate(p: RootPolynomial, z) -> np.ndarray:
    """Complex log of p(z); real part is log|p|, imaginary part the argument
    summed branch by branch."""
    arr, scalar = _as_array(z)
    flat = arr.ravel()
    if p.lead == 0:
        out = np.full(flat.shape, complex(-math.inf, 0.0))
        return complex(out[0]) if scalar else out.reshape(arr.shape)
    out = np.full(flat.shape, complex(np.log(complex(p.lead))))
    if p.roots:
        roots = np.asarray(p.roots)
        nb = _root_blocks(flat.size, roots.size)
        for blk in np.array_split(roots, nb):
            out += np.log(flat[:, None] - blk[None, :]).sum(axis=1)
    out = out.reshape(arr.shape)
    return complex(out) if scalar else out


def evaluate(p: RootPolynomial, z):
    """p(z) itself.  Overflows for large degrees; meant for small n and
    for tests."""
    arr, scalar = _as_array(z)
    if p.n == 0:
        out = np.full(arr.shape, p.lead)
        return complex(p.lead) if scalar else out
    out = np.exp(log_evaluate(p, arr))
    return complex(out) if scalar else out


def log_derivative(p: RootPolynomial, z):
    """p'(z)/p(z) = sum 1/(z - root_j).  Raises SingularPoint when z sits
    on a root (relative threshold 1e-14 of the root spread)."""
    arr, scalar = _as_array(z)
    flat = arr.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if p.roots:
        roots = np.asarray(p.roots)
        thresh = _SINGULAR * p.scale()
        nb = _root_blocks(flat.size, roots.size)
        for blk in np.array_split(roots, nb):
            diff = flat[:, None] - blk[None, :]
            if (np.abs(diff) < thresh).any():
                raise SingularPoint(
                    "logarithmic derivative evaluated on a root")
            out += (1.0 / diff).sum(axis=1)
    out = out.reshape(arr.shape)
    return complex(out) if scalar else out


def _logabs_dp_coeff(p: RootPolynomial, flat: np.ndarray) -> np.ndarray:
    # expand around the root centroid: centered roots keep the expanded
    # coefficients small, which keeps Horner cancellation at rounding level
    roots = np.asarray(p.roots)
    c = roots.mean()
    coeffs = np.poly(roots - c)
    dcoeffs = np.polyder(coeffs)
    vals = np.polyval(dcoeffs, flat - c)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(vals)) + math.log(abs(p.lead))


def _logabs_dp_logroute(p: RootPolynomial, flat: np.ndarray) -> np.ndarray:
    roots = np.asarray(p.roots)
    thresh = _NEAR_ROOT * p.scale()
    la = np.full(flat.shape, math.log(abs(p.lead)))
    S = np.zeros(flat.shape, dtype=complex)
    nearest = np.full(flat.shape, np.inf)
    nearest_j = np.zeros(flat.shape, dtype=np.int64)
    nb = _root_blocks(flat.size, roots.size)
    offset = 0
    for blk in np.array_split(roots, nb):
        diff = flat[:, None] - blk[None, :]
        ad = np.abs(diff)
        jmin = np.argmin(ad, axis=1)
        dmin = ad[np.arange(flat.size), jmin]
        upd = dmin < nearest
        nearest[upd] = dmin[upd]
        nearest_j[upd] = jmin[upd] + offset
        with np.errstate(divide="ignore"):
            la += np.log(ad).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            S += np.where(ad > 0, 1.0 / np.where(ad > 0, diff, 1.0),
                          0.0).sum(axis=1)
        offset += blk.size
    out = np.empty(flat.shape)
    close = nearest < thresh
    far = ~close
    with np.errstate(divide="ignore", invalid="ignore"):
        out[far] = la[far] + np.log(np.abs(S[far]))
    # On or next to a root the log route cancels badly; switch to the
    # cofactor form p'(z) ~ lead * prod_{k != j} (z - root_k).
    for i in np.nonzero(close)[0]:
        j = nearest_j[i]
        others = np.delete(roots, j)
        diff = flat[i] - others
        s_rest = (1.0 / diff).sum() if others.size else 0.0
        base = math.log(abs(p.lead))
        if others.size:
            base += float(np.log(np.abs(diff)).sum())
        corr = abs(1.0 + (flat[i] - roots[j]) * s_rest)
        out[i] = base + (math.log(corr) if corr > 0 else -math.inf)
    return out


def logabs_derivative(p: RootPolynomial, z):
    """log |p'(z)|.  Small degrees go through expanded coefficients, large
    ones through |p| * |p'/p| with a cofactor fallback next to roots; the
    two routes agree to ~1e-9 where they overlap."""
    arr, scalar = _as_array(z)
    flat = arr.ravel()
    if p.n == 0 or p.lead == 0:
        out = np.full(flat.shape, -math.inf)
    elif p.n <= 64:
        out = _logabs_dp_coeff(p, flat)
    else:
        out = _logabs_dp_logroute(p, flat)
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


# ------------------------------------------------------------- quadrature

@dataclass(frozen=True)
class QuadratureGrid:
    """Arclength nodes and weights of a composite 16-node Gauss-Legendre
    rule along the boundary; weights sum to the perimeter."""

    s: np.ndarray
    w: np.ndarray
    panels: tuple

    @classmethod
    def build(cls, K: ConvexDomain, panels_per_edge: int = 8
              ) -> "QuadratureGrid":
        bounds = []
        if K.kind == "polygon":
            cum = [K.vertex_s(i) for i in range(len(K.vertices))]
            cum.append(K.perimeter)
            for a, b in zip(cum[:-1], cum[1:]):
                for k in range(panels_per_edge):
                    bounds.append((a + (b - a) * k / panels_per_edge,
                                   a + (b - a) * (k + 1) / panels_per_edge))
        else:
            m = 8 * panels_per_edge
            for k in range(m):
                bounds.append((K.perimeter * k / m,
                               K.perimeter * (k + 1) / m))
        ss, ws = [], []
        for a, b in bounds:
            half = 0.5 * (b - a)
            ss.append(0.5 * (a + b) + half * _XG)
            ws.append(half * _WG)
        return cls(np.concatenate(ss), np.concatenate(ws), tuple(bounds))

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())


def _panel_log_integral(K, flog, q, a, b):
    """log of the integral of e^{q * flog} over the boundary piece [a, b]."""
    half = 0.5 * (b - a)
    s = 0.5 * (a + b) + half * _XG
    li = q * flog(K.gamma(s))
    m = float(np.max(li))
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.sum(_WG * half * np.exp(li - m))))


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _adaptive_log_integral(K, flog, q, rel_tol, max_depth=26, seeds=None):
    """Adaptive split-and-compare composite rule; each panel is accepted
    when one extra halving moves its value by under rel_tol."""
    if seeds is None and K.kind == "polygon":
        seeds = []
        cum = [K.vertex_s(i) for i in range(len(K.vertices))]
        cum.append(K.perimeter)
        for a, b in zip(cum[:-1], cum[1:]):
            for k in range(4):
                seeds.append((a + (b - a) * k / 4, a + (b - a) * (k + 1) / 4))
    elif seeds is None:
        seeds = [(K.perimeter * k / 16, K.perimeter * (k + 1) / 16)
                 for k in range(16)]
    accepted = []
    stack = [(a, b, _panel_log_integral(K, flog, q, a, b), 0)
             for a, b in seeds]
    panels = len(stack)
    while stack:
        a, b, coarse, depth = stack.pop()
        mid = 0.5 * (a + b)
        left = _panel_log_integral(K, flog, q, a, mid)
        right = _panel_log_integral(K, flog, q, mid, b)
        fine = _logaddexp(left, right)
        if fine == -math.inf and coarse == -math.inf:
            continue
        close = (fine != -math.inf and coarse != -math.inf
                 and abs(math.expm1(coarse - fine)) <= rel_tol)
        if close or depth >= max_depth:
            accepted.append(fine)
            continue
        panels += 2
        stack.append((a, mid, left, depth + 1))
        stack.append((mid, b, right, depth + 1))
    total = -math.inf
    for v in accepted:
        total = _logaddexp(total, v)
    return total, panels


# ------------------------------------------------------------- sup norm

@dataclass(frozen=True)
class SupNorm:
    log_value: float
    s: float
    z: complex

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo, hi, iters=80):
    a, b = lo, hi
    c = b - _INV_GOLD * (b - a)
    d = a + _INV_GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def sup_norm(p: RootPolynomial, K: ConvexDomain, flog=None) -> SupNorm:
    """Max of |p| (or of e^{flog} when flog is given) over the boundary:
    dense mesh, then golden-section polish around every local peak in
    the top tier."""
    if flog is None:
        flog = lambda z: log_abs(p, z)
    per_edge = max(512, 8 * max(p.n, 1))
    if K.kind == "polygon":
        count = per_edge * len(K.vertices)
    else:
        count = max(4096, 8 * max(p.n, 1))
    ss = np.linspace(0.0, K.perimeter, count, endpoint=False)
    vals = flog(K.gamma(ss))
    best_val = float(np.max(vals))
    # local maxima on the cyclic mesh, keeping only near-top candidates
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    is_peak = (vals >= left) & (vals >= right)
    cutoff = best_val - max(2.0, 1e-6 * abs(best_val))
    cand = np.nonzero(is_peak & (vals >= cutoff))[0]
    order = np.argsort(vals[cand])[::-1][:16]
    cand = cand[order]
    step = K.perimeter / count
    best = (best_val, float(ss[int(np.argmax(vals))]))
    g = lambda s: float(flog(K.gamma(np.asarray([s % K.perimeter])))[0])
    for i in cand:
        s0 = float(ss[i])
        s_ref, v_ref = _golden_max(g, s0 - step, s0 + step)
        if v_ref > best[0]:
            best = (v_ref, s_ref % K.perimeter)
    log_value, s_at = best
    return SupNorm(log_value, s_at, complex(K.gamma(s_at)))


# ------------------------------------------------------------- Lq norms

@dataclass(frozen=True)
class LqNorm:
    q: float
    log_value: float
    panels: int

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def lq_norm(p: RootPolynomial, K: ConvexDomain, q: float,
            rel_tol: float = 1e-8, derivative: bool = False,
            grid: QuadratureGrid = None) -> LqNorm:
    """(integral over the boundary of |p|^q ds)^(1/q); q = inf routes to
    the sup norm.  Set derivative=True for |p'|.  A grid, when given,
    seeds the adaptive panels."""
    if q != math.inf and q < 1:
        raise ValueError("q must be at least 1 (or inf)")
    flog = (lambda z: logabs_derivative(p, z)) if derivative \
        else (lambda z: log_abs(p, z))
    if q == math.inf:
        sup = sup_norm(p, K, flog=flog)
        return LqNorm(math.inf, sup.log_value, 0)
    seeds = grid.panels if grid is not None else None
    log_int, panels = _adaptive_log_integral(K, flog, q, rel_tol,
                                             seeds=seeds)
    return LqNorm(q, log_int / q, panels)


@dataclass(frozen=True)
class MarkovFactor:
    """M_q(p) = |p'|_q / |p|_q on the boundary, computed on the monic
    normalization so the answer is exactly scale invariant."""

    q: float
    log_norm_p: float
    log_norm_dp: float

    @property
    def M(self) -> float:
        if self.log_norm_dp == -math.inf:
            return 0.0
        return math.exp(self.log_norm_dp - self.log_norm_p)

    @property
    def norm_p(self) -> float:
        try:
            return math.exp(self.log_norm_p)
        except OverflowError:
            return math.inf

    @property
    def norm_dp(self) -> float:
        try:
            return math.exp(self.log_norm_dp)
        except OverflowError:
            return math.inf

    def as_record(self) -> dict:
        return {"q": self.q, "norm_p": self.norm_p,
                "norm_dp": self.norm_dp, "M": self.M}


def inverse_markov_factor(p: RootPolynomial, K: ConvexDomain, q: float,
                          rel_tol: float = 1e-8) -> MarkovFactor:
    """The oscillation factor of p on the boundary of K."""
    if p.lead == 0:
        raise ZeroNorm("polynomial is identically zero")
    mp = p.monic()
    log_p = lq_norm(mp, K, q, rel_tol).log_value
    if mp.n == 0:
        return MarkovFactor(q, log_p, -math.inf)
    log_dp = lq_norm(mp, K, q, rel_tol, derivative=True).log_value
    # the true leading factor shifts both norms by the same log
    return MarkovFactor(q, log_p, log_dp)
