"""Norm and derivative oracles.

Circle cases have closed forms: |z^n| = 1 on the unit circle so every
L^q norm is (2*pi)^(1/q) and M_q(z^n) = n exactly; z^2 - 1 integrates by
hand.  Everything else is checked against dense composite trapezoid sums
and brute-force meshes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscillab.errors import SingularPoint, ZeroNorm
from oscillab.geometry import ConvexDomain
from oscillab.polynomials import (
    LqNorm,
    MarkovFactor,
    QuadratureGrid,
    RootPolynomial,
    _logabs_dp_coeff,
    _logabs_dp_logroute,
    evaluate,
    inverse_markov_factor,
    log_abs,
    log_derivative,
    logabs_derivative,
    lq_norm,
    sup_norm,
)
from oscillab.sampling import random_convex_polygon, random_roots_in, trial_rng

TWO_PI = 2 * math.pi


def trapezoid_norm(p, K, q, pts_per_edge=200_001):
    """Composite trapezoid of |p|^q along each edge (or the whole circle)."""
    pieces = []
    if K.kind == "polygon":
        cum = [K.vertex_s(i) for i in range(len(K.vertices))]
        cum.append(K.perimeter)
        for a, b in zip(cum[:-1], cum[1:]):
            pieces.append(np.linspace(a, b, pts_per_edge))
    else:
        pieces.append(np.linspace(0.0, K.perimeter, 4 * pts_per_edge))
    total = 0.0
    for ss in pieces:
        vals = np.exp(q * log_abs(p, K.gamma(ss)))
        h = ss[1] - ss[0]
        total += h * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    return total ** (1.0 / q)


# --------------------------------------------------------------- basics

def test_evaluate_and_log_abs():
    p = RootPolynomial(2.0, [1.0, -1.0])
    assert evaluate(p, 2.0) == pytest.approx(6.0)
    assert evaluate(p, 0j) == pytest.approx(-2.0)
    zs = np.array([2.0 + 0j, 3.0 + 0j])
    np.testing.assert_allclose(evaluate(p, zs), [6.0, 16.0])
    assert log_abs(p, 2.0) == pytest.approx(math.log(6.0))
    assert log_abs(p, 1.0) == -math.inf


def test_constant_polynomial():
    p = RootPolynomial(3.0, [])
    assert p.n == 0
    assert evaluate(p, 5.0) == pytest.approx(3.0)
    K = ConvexDomain.unit_disk()
    rep = inverse_markov_factor(p, K, 2.0)
    assert rep.M == 0.0


def test_json_roundtrip():
    p = RootPolynomial(1.5 - 0.5j, [0.1 + 0.2j, -0.3j])
    p2 = RootPolynomial.from_json(p.to_json())
    assert p2.lead == p.lead and p2.roots == p.roots


def test_log_derivative_matches_finite_difference():
    p = RootPolynomial(1.0, [0.2 + 0.1j, -0.4, 0.5j])
    z = 1.1 + 0.3j
    h = 1e-7
    fd = (evaluate(p, z + h) - evaluate(p, z - h)) / (2 * h) / evaluate(p, z)
    assert log_derivative(p, z) == pytest.approx(fd, rel=1e-6)


def test_log_derivative_singular_on_root():
    p = RootPolynomial(1.0, [0.5 + 0j])
    with pytest.raises(SingularPoint):
        log_derivative(p, 0.5 + 0j)


def test_zero_polynomial_rejected():
    K = ConvexDomain.unit_disk()
    with pytest.raises(ZeroNorm):
        inverse_markov_factor(RootPolynomial(0.0, [1.0]), K, 2.0)


# --------------------------------------------------------------- circle

def test_power_norms_on_circle():
    K = ConvexDomain.unit_disk()
    for n in (1, 5, 40):
        p = RootPolynomial(1.0, [0.0] * n)
        for q in (1.0, 2.0, 7.0):
            got = lq_norm(p, K, q)
            assert got.value == pytest.approx(TWO_PI ** (1 / q), rel=1e-7)
            rep = inverse_markov_factor(p, K, q)
            assert rep.M == pytest.approx(n, rel=1e-7)
        rep = inverse_markov_factor(p, K, math.inf)
        assert rep.M == pytest.approx(n, rel=1e-9)


def test_quadratic_norms_on_circle():
    K = ConvexDomain.unit_disk()
    p = RootPolynomial(1.0, [1.0, -1.0])  # z^2 - 1
    assert lq_norm(p, K, 1.0).value == pytest.approx(8.0, rel=1e-7)
    assert lq_norm(p, K, 2.0).value == pytest.approx(
        math.sqrt(4 * math.pi), rel=1e-7)
    assert lq_norm(p, K, 1.0, derivative=True).value == pytest.approx(
        4 * math.pi, rel=1e-7)
    assert inverse_markov_factor(p, K, 1.0).M == pytest.approx(
        math.pi / 2, rel=1e-6)
    assert inverse_markov_factor(p, K, 2.0).M == pytest.approx(
        math.sqrt(2.0), rel=1e-6)
    sup = sup_norm(p, K)
    assert sup.value == pytest.approx(2.0, rel=1e-9)
    assert inverse_markov_factor(p, K, math.inf).M == pytest.approx(
        1.0, rel=1e-6)


# --------------------------------------------------------------- square

def test_square_norm_against_trapezoid():
    K = ConvexDomain.unit_square()
    p = RootPolynomial(1.0, [0.3 + 0.2j, -0.1 + 0.8j, 1.0 + 1.0j])
    for q in (1.0, 3.0):
        want = trapezoid_norm(p, K, q)
        got = lq_norm(p, K, q)
        assert got.value == pytest.approx(want, rel=1e-6)


def test_polygon_sup_norm_against_dense_mesh():
    rng = trial_rng(20260818, 20)
    for _ in range(5):
        K = random_convex_polygon(rng, vertices=int(rng.integers(3, 8)))
        roots = random_roots_in(K, 12, rng)
        p = RootPolynomial(1.0, roots)
        ss = np.linspace(0, K.perimeter, 400_000, endpoint=False)
        vals = log_abs(p, K.gamma(ss))
        s0 = float(ss[int(np.argmax(vals))])
        h = K.perimeter / 400_000
        local = np.linspace(s0 - 2 * h, s0 + 2 * h, 200_001) % K.perimeter
        brute = float(np.max(log_abs(p, K.gamma(local))))
        got = sup_norm(p, K)
        assert got.log_value >= brute - 1e-9
        assert got.log_value == pytest.approx(brute, abs=1e-6)


# --------------------------------------------------------------- routes

def test_derivative_routes_agree():
    rng = trial_rng(20260818, 21)
    K = ConvexDomain.unit_square()
    roots = random_roots_in(K, 50, rng)
    p = RootPolynomial(1.0, roots)
    ss = rng.uniform(0, K.perimeter, size=200)
    zs = K.gamma(ss)
    a = _logabs_dp_coeff(p, zs)
    b = _logabs_dp_logroute(p, zs)
    np.testing.assert_allclose(a, b, rtol=1e-8, atol=1e-8)


def test_large_degree_derivative_against_coefficients():
    rng = trial_rng(20260818, 22)
    K = ConvexDomain.unit_disk()
    roots = random_roots_in(K, 80, rng)
    p = RootPolynomial(1.0, roots)
    zs = K.gamma(rng.uniform(0, K.perimeter, size=100))
    got = logabs_derivative(p, zs)  # log route at this degree
    coeffs = np.polyder(np.poly(np.asarray(roots)))
    want = np.log(np.abs(np.polyval(coeffs, zs)))
    np.testing.assert_allclose(got, want, rtol=1e-7, atol=1e-7)


def test_derivative_exactly_on_root():
    rng = trial_rng(20260818, 23)
    K = ConvexDomain.unit_disk()
    roots = list(random_roots_in(K, 70, rng))
    z0 = roots[3]
    p = RootPolynomial(1.0, roots)
    got = logabs_derivative(p, np.asarray([z0]))[0]
    others = np.asarray([r for i, r in enumerate(roots) if i != 3])
    want = float(np.log(np.abs(z0 - others)).sum())
    assert got == pytest.approx(want, rel=1e-9)


def test_scale_invariance_of_markov_factor():
    K = ConvexDomain.unit_square()
    roots = [0.2 + 0.3j, 0.7 + 0.6j, 0.5 + 0.1j]
    a = inverse_markov_factor(RootPolynomial(1.0, roots), K, 2.0)
    b = inverse_markov_factor(RootPolynomial(1e200, roots), K, 2.0)
    assert a.M == b.M
    assert a.log_norm_p == b.log_norm_p


# --------------------------------------------------------------- grids

def test_quadrature_weights_sum_to_perimeter():
    for K in (ConvexDomain.unit_square(), ConvexDomain.disk(1j, 2.5),
              random_convex_polygon(trial_rng(20260818, 24), vertices=7)):
        grid = QuadratureGrid.build(K)
        assert grid.total_weight == pytest.approx(K.perimeter,
                                                  abs=1e-10 * K.perimeter)
        assert np.all(grid.w > 0)
        assert np.all((grid.s >= 0) & (grid.s <= K.perimeter))


def test_quadrature_integrates_arclength_polynomials():
    K = ConvexDomain.unit_square()
    grid = QuadratureGrid.build(K)
    # s^3 is polynomial on each edge piece, so the rule is exact
    got = float((grid.w * grid.s ** 3).sum())
    assert got == pytest.approx(4.0 ** 4 / 4, rel=1e-12)


# --------------------------------------------------------------- records

def test_markov_record_fields():
    K = ConvexDomain.unit_disk()
    p = RootPolynomial(1.0, [0.0, 0.0])
    rep = inverse_markov_factor(p, K, 2.0)
    rec = rep.as_record()
    assert set(rec) == {"q", "norm_p", "norm_dp", "M"}
    assert rec["M"] == pytest.approx(2.0, rel=1e-7)
    assert rec["norm_dp"] / rec["norm_p"] == pytest.approx(rec["M"])


def test_huge_degree_norm_stays_finite_in_log():
    K = ConvexDomain.disk(0j, 2.0)
    p = RootPolynomial(1.0, [0.0] * 600)
    rep = inverse_markov_factor(p, K, 4.0)
    # |p| = 2^600 on the circle; the ratio must stay clean
    assert rep.M == pytest.approx(300.0, rel=1e-6)
    assert rep.log_norm_p == pytest.approx(
        600 * math.log(2.0) + math.log(4 * math.pi) / 4, rel=1e-9)


def test_translation_covariance():
    rng = trial_rng(20260818, 25)
    K = random_convex_polygon(rng, vertices=5)
    roots = random_roots_in(K, 8, rng)
    t = 3.7 - 2.2j
    K2 = ConvexDomain.polygon([v + t for v in K.vertices])
    a = inverse_markov_factor(RootPolynomial(1.0, roots), K, 2.0)
    b = inverse_markov_factor(
        RootPolynomial(1.0, [r + t for r in roots]), K2, 2.0)
    assert a.M == pytest.approx(b.M, rel=1e-10)


def test_lq_norm_approaches_sup_norm():
    rng = trial_rng(20260818, 26)
    K = ConvexDomain.unit_disk()
    p = RootPolynomial(1.0, random_roots_in(K, 6, rng))
    sup = sup_norm(p, K)
    prev = None
    for q in (2.0, 8.0, 64.0):
        nq = lq_norm(p, K, q)
        normalized = nq.log_value - math.log(K.perimeter) / q
        assert normalized <= sup.log_value + 1e-9
        if prev is not None:
            assert normalized >= prev - 1e-9
        prev = normalized
    assert math.exp(prev - sup.log_value) > 0.95


def test_disk_pointwise_derivative_floor():
    # roots inside a disk of radius R force |p'/p| >= n/(2R) on the rim
    rng = trial_rng(20260818, 27)
    for trial in range(100):
        R = float(rng.uniform(0.5, 3.0))
        K = ConvexDomain.disk(complex(*rng.normal(size=2)), R)
        n = int(rng.integers(1, 30))
        p = RootPolynomial(1.0, random_roots_in(K, n, rng))
        zs = K.gamma(rng.uniform(0, K.perimeter, size=64))
        ratio = logabs_derivative(p, zs) - log_abs(p, zs)
        floor = math.log(n / (2 * R))
        assert np.all(ratio >= floor - 1e-7), (trial, R, n)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_norm_dominated_by_sup(seed):
    rng = np.random.default_rng(seed)
    K = random_convex_polygon(rng, vertices=int(rng.integers(3, 8)))
    n = int(rng.integers(1, 12))
    p = RootPolynomial(1.0, random_roots_in(K, n, rng))
    q = float(rng.uniform(1.0, 6.0))
    nq = lq_norm(p, K, q)
    sup = sup_norm(p, K)
    bound = sup.log_value + math.log(K.perimeter) / q
    assert nq.log_value <= bound + 1e-7
    assert nq.log_value > -math.inf
