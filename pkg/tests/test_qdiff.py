"""Dilation operators and the annihilation residual."""

import cmath
import random
from fractions import Fraction

import pytest

from qzeros.errors import DegreeMismatch
from qzeros.params import ParamSet
from qzeros.qdiff import (
    DilationOp,
    apply_delta,
    apply_Delta,
    expanded_residual,
    qde_expanded_agreement,
    qde_residual,
)
from qzeros.qseries import Poly, coeffs_P, to_monic

from conftest import zeros_of


def _sample_points(params, rng, count=20):
    lim = max(1.0, abs(params.q) ** (-params.N))
    pts = []
    for _ in range(count):
        radius = rng.uniform(0.05, 1.0) * lim
        angle = rng.uniform(-3.1, 3.1)
        pts.append(radius * cmath.exp(1j * angle))
    return pts


def test_apply_delta_hand_cases():
    c = 2.5 - 1.0j
    out = apply_delta(Poly((c,), monic=False), 0.3)
    assert out.coeffs == (c,)

    out = apply_delta(Poly((0.0, 1.0), monic=True), 3.0)
    assert out.coeffs == (0.0, 3.0)

    out = apply_delta(Poly((1.0, 1.0, 1.0), monic=True), 2.0)
    assert out.coeffs == (1.0, 2.0, 4.0)


def test_apply_Delta_hand_cases():
    q = 0.5
    out = apply_Delta(DilationOp(1.0), Poly((4.0 + 1.0j,), monic=False), q)
    assert out.coeffs == (0.0,)

    # Delta_{q^{-N}} kills the z^N monomial: (q^{-2} q^2 - 1) = 0.
    out = apply_Delta(DilationOp(q ** (-2)), Poly((0.0, 0.0, 1.0), monic=True), q)
    assert abs(out.coeffs[2]) < 1e-15
    # the lower coefficients are zero already, so the whole vector vanishes
    assert all(abs(v) < 1e-15 for v in out.coeffs)

    out = apply_Delta(DilationOp(3.0), Poly((1.0, 1.0), monic=True), 2.0)
    assert out.coeffs == (2.0, 5.0)


def test_commutation_exact_over_rationals():
    # Diagonal scalings commute; with exact scalars the coefficient tuples
    # agree bitwise, no tolerance involved.
    q = Fraction(3, 7)
    g1 = Fraction(5, 2)
    g2 = Fraction(-4, 9)
    p = Poly(tuple(Fraction(k * k - 3, k + 1) for k in range(6)), monic=False)
    ab = apply_Delta(DilationOp(g1), apply_Delta(DilationOp(g2), p, q), q)
    ba = apply_Delta(DilationOp(g2), apply_Delta(DilationOp(g1), p, q), q)
    assert ab.coeffs == ba.coeffs


def test_commutation_float_to_rounding():
    # In binary64 the two orders group the same three factors differently,
    # so agreement is to a couple of ulp rather than bitwise.
    rng = random.Random(11)
    for _ in range(40):
        q = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        g1 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        g2 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        p = Poly(tuple(complex(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(7)), monic=False)
        ab = apply_Delta(DilationOp(g1), apply_Delta(DilationOp(g2), p, q), q)
        ba = apply_Delta(DilationOp(g2), apply_Delta(DilationOp(g1), p, q), q)
        for x, y in zip(ab.coeffs, ba.coeffs):
            assert abs(x - y) <= 8e-16 * max(abs(x), abs(y), 1e-30)


def test_annihilation_on_suite(suite):
    rng = random.Random(405)
    for params in suite:
        p = to_monic(coeffs_P(params))
        pts = _sample_points(params, rng)
        res = qde_residual(p, params, pts)
        assert max(abs(v) for v in res) < 1e-9


def test_expanded_form_equivalence(suite):
    rng = random.Random(406)
    for params in suite:
        p = to_monic(coeffs_P(params))
        pts = _sample_points(params, rng)
        gaps = qde_expanded_agreement(p, params, pts)
        assert max(gaps) < 1e-10


def test_expanded_residual_matches_operator_route(small_suite):
    # expanded_residual is the same identity evaluated addend by addend; on
    # the true polynomial it vanishes just like the operator route.
    rng = random.Random(407)
    for params in small_suite:
        p = to_monic(coeffs_P(params))
        pts = _sample_points(params, rng, count=8)
        res = expanded_residual(p, params, pts)
        assert max(abs(v) for v in res) < 1e-9


def test_monomial_alone_is_not_annihilated():
    params = ParamSet(r=1, s=1, N=3, q=0.45, alpha=(0.7 + 0.2j,), beta=(1.3 - 0.4j,))
    p = Poly((0.0, 0.0, 0.0, 1.0), monic=True)
    res = qde_residual(p, params, [0.8 + 0.3j, -0.5j, 1.1])
    assert max(abs(v) for v in res) > 1e-3


def test_linear_case_cancels_by_hand():
    # r=s=0, N=1, p = z - q: the A side is (q-1)z, the B side times z is the
    # same, so the residual is pure round-off from computing q^{-1} q.
    q = 0.45
    params = ParamSet(r=0, s=0, N=1, q=q, alpha=(), beta=())
    p = Poly((-q, 1.0), monic=True)
    res = qde_residual(p, params, [0.3, -1.7 + 0.2j, 5.0j])
    assert max(abs(v) for v in res) < 1e-13


def test_true_zeros_annihilate(small_suite):
    # The defining property at the zeros themselves: both routes vanish.
    for params in small_suite:
        p, zset = zeros_of(params)
        res = qde_residual(p, params, zset.zeros)
        assert max(abs(v) for v in res) < 1e-9


def test_degree_mismatch_raised():
    params = ParamSet(r=0, s=1, N=2, q=0.5, beta=(1.4,))
    short = Poly((1.0, 1.0), monic=True)
    with pytest.raises(DegreeMismatch):
        qde_residual(short, params, [1.0])
    with pytest.raises(DegreeMismatch):
        expanded_residual(short, params, [1.0])
    with pytest.raises(DegreeMismatch):
        qde_expanded_agreement(short, params, [1.0])
