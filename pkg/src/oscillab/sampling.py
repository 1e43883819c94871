"""Seeded random generators for domains, polynomials, and trial plumbing.

Batch audits and tests draw their inputs here so that a master seed plus a
trial index reproduces any single trial exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import ConvexDomain

TWO_PI = 2.0 * math.pi


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial of a seeded batch."""
    return np.random.default_rng([int(master_seed), int(trial_index)])


def random_convex_polygon(rng: np.random.Generator, vertices: int = 8,
                          scale: float = 1.0, center: complex = 0j,
                          irregularity: float = 0.35) -> ConvexDomain:
    """Random strictly convex polygon with the requested vertex count.

    Vertices are placed at sorted random angles with mildly varying radii;
    radius variation is capped so the polygon stays convex, then the hull
    condition is checked and the draw repeated if a near-degenerate corner
    slipped through.
    """
    if vertices < 3:
        raise ValueError("need at least 3 vertices")
    for _ in range(64):
        gaps = rng.uniform(0.5, 1.5, size=vertices)
        angles = TWO_PI * np.cumsum(gaps) / gaps.sum()
        radii = scale * (1.0 + irregularity * rng.uniform(-1.0, 1.0,
                                                          size=vertices))
        pts = center + radii * np.exp(1j * angles)
        pts = _convex_subset(pts)
        if len(pts) == vertices:
            try:
                return ConvexDomain.polygon([complex(p) for p in pts])
            except ValueError:
                continue
    # fall back to a concyclic polygon, always strictly convex
    gaps = rng.uniform(0.5, 1.5, size=vertices)
    angles = TWO_PI * np.cumsum(gaps) / gaps.sum()
    pts = center + scale * np.exp(1j * angles)
    return ConvexDomain.polygon([complex(p) for p in pts])


def _convex_subset(pts: np.ndarray) -> np.ndarray:
    """Convex hull of points already sorted by angle (monotone pass)."""
    pts = list(pts)
    n = len(pts)
    keep = []
    for i in range(n):
        keep.append(pts[i])
        while len(keep) >= 3:
            a, b, c = keep[-3], keep[-2], keep[-1]
            if ((b - a).real * (c - b).imag
                    - (b - a).imag * (c - b).real) <= 1e-12:
                keep.pop(-2)
            else:
                break
    # close the loop: drop head/tail points that turn the wrong way
    changed = True
    while changed and len(keep) > 3:
        changed = False
        for (i, j, k) in ((-2, -1, 0), (-1, 0, 1)):
            a, b, c = keep[i], keep[j], keep[k]
            if ((b - a).real * (c - b).imag
                    - (b - a).imag * (c - b).real) <= 1e-12:
                keep.pop(j if j >= 0 else len(keep) + j)
                changed = True
                break
    return np.asarray(keep)


def random_domain(rng: np.random.Generator, allow_disk: bool = True
                  ) -> ConvexDomain:
    if allow_disk and rng.uniform() < 0.2:
        return ConvexDomain.disk(
            complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)),
            rng.uniform(0.5, 1.5))
    return random_convex_polygon(rng, vertices=int(rng.integers(4, 10)),
                                 scale=rng.uniform(0.6, 1.4))


def random_roots_in(K: ConvexDomain, n: int,
                    rng: np.random.Generator) -> np.ndarray:
    """n independent uniform points of K."""
    return K.sample_uniform(n, rng)


def random_roots_loose(K: ConvexDomain, n: int, rng: np.random.Generator,
                       spread: float = 1.0) -> np.ndarray:
    """Roots scattered in a box around K, not restricted to K.

    Used by audits whose inequalities hold for arbitrary polynomials of a
    given degree.
    """
    if K.kind == "disk":
        c = K.center
        half = (0.5 + spread) * K.radius
    else:
        xs = [v.real for v in K.vertices]
        ys = [v.imag for v in K.vertices]
        c = complex((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2)
        half = (0.5 + spread) * max(max(xs) - min(xs), max(ys) - min(ys))
    re = rng.uniform(c.real - half, c.real + half, size=n)
    im = rng.uniform(c.imag - half, c.imag + half, size=n)
    return re + 1j * im


def random_boundary_s(K: ConvexDomain, rng: np.random.Generator,
                      count: int | None = None):
    s = rng.uniform(0.0, K.perimeter, size=count)
    return s if count is not None else float(s)
