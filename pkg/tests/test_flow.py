"""Coefficient-space evolution and the zero-space flow."""

import cmath
import warnings

import numpy as np
import pytest
import scipy.linalg

from qzeros.errors import CollisionDetected, ConsistencyWarning, RepeatedEigenvalue
from qzeros.flow import (
    CoeffState,
    FlowState,
    TriangularC,
    build_C,
    equilibrium_residual,
    evolve_coeffs,
    fixed_point,
    flow_rhs,
    flow_rhs_from_products,
    integrate_flow,
    jacobian_fd,
)
from qzeros.isospectral import build_M, mu_closed
from qzeros.params import ParamSet
from qzeros.qseries import coeffs_P, to_monic

from conftest import zeros_of

CONTRACTIVE = ParamSet(r=0, s=1, N=6, q=0.45, alpha=(), beta=(1.3 - 0.4j,))


def _monic_from_zeros(zs):
    """Ascending coefficients of prod (z - z_n)."""
    coeffs = [1.0 + 0.0j]
    for z in zs:
        nxt = [0.0j] * (len(coeffs) + 1)
        for m, c in enumerate(coeffs):
            nxt[m + 1] += c
            nxt[m] -= c * z
        coeffs = nxt
    return coeffs


def test_build_C_diag_is_mu_closed(small_suite):
    for params in small_suite:
        C = build_C(params)
        assert C.diag == tuple(mu_closed(params))
        assert len(C.sub) == params.N


def test_build_C_hand_cases():
    q = 0.45
    p00 = ParamSet(r=0, s=0, N=3, q=q, alpha=(), beta=())
    C = build_C(p00)
    for n, d in enumerate(C.diag, start=1):
        assert d == -(q ** (-n) - 1)

    beta1 = 1.6 - 0.3j
    p01 = ParamSet(r=0, s=1, N=2, q=q, alpha=(), beta=(beta1,))
    C = build_C(p01)
    assert abs(C.sub[1] - (q - 1) * (beta1 - 1)) < 1e-15


def test_build_C_repeated_eigenvalue():
    # alpha = 0.8 makes mu_1 = mu_2 for q = 1/2, N = 2, r = 1
    params = ParamSet(r=1, s=1, N=2, q=0.5, alpha=(0.8,), beta=(1.3,))
    with pytest.raises(RepeatedEigenvalue):
        build_C(params)


def test_fixed_point_is_equilibrium_polynomial(small_suite):
    for params in small_suite:
        p = to_monic(coeffs_P(params))
        star = fixed_point(build_C(params))
        for m in range(1, params.N + 1):
            ref = p.coeffs[params.N - m]
            assert abs(star[m - 1] - ref) < 1e-10 * max(1.0, abs(ref))


def test_evolve_identity_at_t0():
    params = ParamSet(r=1, s=1, N=5, q=0.45, alpha=(0.7 + 0.2j,), beta=(1.3 - 0.4j,))
    C = build_C(params)
    c0 = CoeffState(c=tuple(complex(0.3 * k, 0.1 - 0.05 * k) for k in range(1, 6)), t=0.25)
    back = evolve_coeffs(C, c0, 0.25)
    scale = max(abs(v) for v in c0.c)
    assert back.t == 0.25
    assert max(abs(a - b) for a, b in zip(back.c, c0.c)) < 1e-13 * scale


def test_evolve_equilibrium_is_constant():
    params = ParamSet(r=0, s=0, N=5, q=0.45, alpha=(), beta=())
    C = build_C(params)
    star = fixed_point(C)
    c0 = CoeffState(c=star, t=0.0)
    for t in (0.3, 1.0, 2.5):
        out = evolve_coeffs(C, c0, t)
        scale = max(abs(v) for v in star)
        assert max(abs(a - b) for a, b in zip(out.c, star)) < 1e-12 * scale


def test_evolve_n1_hand_solution():
    q = 0.45
    params = ParamSet(r=0, s=0, N=1, q=q, alpha=(), beta=())
    C = build_C(params)
    mu = C.diag[0]
    star = -C.sub[0] / mu
    c_init = 0.3 + 0.2j
    t = 0.8
    out = evolve_coeffs(C, CoeffState(c=(c_init,), t=0.0), t)
    ref = star + (c_init - star) * cmath.exp(mu * t)
    assert abs(out.c[0] - ref) < 1e-13 * max(1.0, abs(ref))


def test_evolve_against_expm_oracle():
    params = ParamSet(r=1, s=1, N=6, q=0.5 + 0.2j, alpha=(0.9 - 0.3j,), beta=(1.4 + 0.1j,))
    C = build_C(params)
    N = C.n
    A = np.zeros((N, N), dtype=complex)
    force = np.zeros(N, dtype=complex)
    for m in range(N):
        A[m, m] = complex(C.diag[m])
        if m == 0:
            force[0] = complex(C.sub[0])
        else:
            A[m, m - 1] = complex(C.sub[m])
    c0 = np.array([0.2 + 0.1j * k for k in range(1, N + 1)], dtype=complex)
    t = 0.37
    star = np.linalg.solve(A, -force)
    ref = scipy.linalg.expm(A * t) @ (c0 - star) + star
    out = evolve_coeffs(C, CoeffState(c=tuple(c0), t=0.0), t)
    scale = max(1.0, float(np.max(np.abs(ref))))
    assert max(abs(a - b) for a, b in zip(out.c, ref)) < 1e-9 * scale


def test_flow_rhs_n1_hand_formula():
    q = 0.45
    params = ParamSet(r=0, s=0, N=1, q=q, alpha=(), beta=())
    for z in (0.7, 0.2 - 0.4j, 1.9 + 0.1j):
        vel = flow_rhs((z,), params)[0]
        ref = (q - 1) * (z / q - 1)
        assert abs(vel - ref) < 1e-14 * max(1.0, abs(ref))
    assert abs(flow_rhs((q,), params)[0]) < 1e-14


def test_equilibrium_residual_on_suite(suite):
    for params in suite:
        _, zset = zeros_of(params)
        assert equilibrium_residual(zset, params) < 1e-8


def test_flow_rhs_collision_detected():
    params = ParamSet(r=0, s=0, N=3, q=0.45, alpha=(), beta=())
    with pytest.raises(CollisionDetected):
        flow_rhs((0.5, 0.5 * (1 + 1e-11), 1.2), params)


def test_dual_route_velocities(small_suite):
    for params in small_suite:
        _, zset = zeros_of(params)
        configs = [zset.zeros]
        twisted = tuple(
            z * (1 + 0.02 * cmath.exp(2j * cmath.pi * n / params.N))
            for n, z in enumerate(zset.zeros)
        )
        configs.append(twisted)
        for zs in configs:
            a = flow_rhs(zs, params)
            b = flow_rhs_from_products(zs, params)
            for va, vb in zip(a, b):
                assert abs(va - vb) < 1e-10 * max(1.0, abs(va), abs(vb))


def _matrix_gap(J, M):
    num = max(
        sum(abs(a - b) for a, b in zip(rj, rm))
        for rj, rm in zip(J, M.entries)
    )
    den = max(sum(abs(v) for v in row) for row in M.entries)
    return num / den


def test_jacobian_matches_M(small_suite):
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConsistencyWarning)
        for params in small_suite:
            _, zset = zeros_of(params)
            J = jacobian_fd(params, zset)
            M = build_M(zset.zeros, params)
            assert _matrix_gap(J, M) < 1e-5


def test_jacobian_n1_hand_case():
    q = 0.45
    params = ParamSet(r=0, s=0, N=1, q=q, alpha=(), beta=())
    _, zset = zeros_of(params)
    J = jacobian_fd(params, zset)
    assert abs(J[0][0] - (q - 1) / q) < 1e-8


def test_single_axis_quotient_is_second_order():
    # plain real-axis central differences against the exact linearization:
    # each halving of h divides the defect by about four
    params = ParamSet(r=1, s=1, N=4, q=0.45, alpha=(0.8,), beta=(1.4,))
    _, zset = zeros_of(params)
    zs = list(zset.zeros)
    M = build_M(zset.zeros, params)
    scale = max(abs(z) for z in zs)

    def defect(h):
        n_count = len(zs)
        worst = 0.0
        for m in range(n_count):
            plus = list(zs)
            minus = list(zs)
            plus[m] = zs[m] + h
            minus[m] = zs[m] - h
            vp = flow_rhs(tuple(plus), params)
            vm = flow_rhs(tuple(minus), params)
            for n in range(n_count):
                quot = (vp[n] - vm[n]) / (2 * h)
                worst = max(worst, abs(quot - M.entries[n][m]))
        return worst

    h0 = 1e-2 * scale
    d0, d1, d2 = defect(h0), defect(h0 / 2), defect(h0 / 4)
    assert 3.0 < d0 / d1 < 5.5
    assert 3.0 < d1 / d2 < 5.5


def test_integrate_holds_equilibrium():
    _, zset = zeros_of(CONTRACTIVE)
    scale = max(abs(z) for z in zset.zeros)
    states = integrate_flow(CONTRACTIVE, FlowState(z=zset.zeros, t=0.0), 1.0, 0.25)
    assert len(states) >= 4
    for st in states:
        drift = max(abs(a - b) for a, b in zip(st.z, zset.zeros))
        assert drift < 1e-8 * scale


def test_integrate_perturbation_follows_linearization():
    _, zset = zeros_of(CONTRACTIVE)
    N = CONTRACTIVE.N
    M = np.array(
        [[complex(v) for v in row] for row in build_M(zset.zeros, CONTRACTIVE).entries]
    )
    xi0 = np.array(
        [1e-4 * cmath.exp(2j * cmath.pi * (n + 0.2) / N) * abs(zset.zeros[n]) for n in range(N)]
    )
    z0 = tuple(z + d for z, d in zip(zset.zeros, xi0))
    states = integrate_flow(CONTRACTIVE, FlowState(z=z0, t=0.0), 0.5, 0.1)
    for st in states[1:]:
        dev = np.array([a - b for a, b in zip(st.z, zset.zeros)])
        pred = scipy.linalg.expm(M * st.t) @ xi0
        assert abs(np.linalg.norm(dev) - np.linalg.norm(pred)) < 0.1 * np.linalg.norm(pred)


def test_integrate_zero_horizon():
    _, zset = zeros_of(CONTRACTIVE)
    st0 = FlowState(z=zset.zeros, t=0.0)
    out = integrate_flow(CONTRACTIVE, st0, 0.0, 0.1)
    assert len(out) == 1
    assert out[0].z == zset.zeros and out[0].t == 0.0


def test_integrate_rejects_collided_start():
    params = ParamSet(r=0, s=0, N=2, q=0.45, alpha=(), beta=())
    z0 = (0.7, 0.7 * (1 + 1e-11))
    with pytest.raises(CollisionDetected):
        integrate_flow(params, FlowState(z=z0, t=0.0), 1.0, 0.1)


def test_two_representations_agree():
    params = ParamSet(r=0, s=1, N=5, q=0.45, alpha=(), beta=(1.3,))
    _, zset = zeros_of(params)
    z0 = tuple(
        z * (1 + 1e-3 * cmath.exp(2j * cmath.pi * n / params.N))
        for n, z in enumerate(zset.zeros)
    )
    C = build_C(params)
    start = _monic_from_zeros(z0)
    c0 = CoeffState(c=tuple(start[params.N - m] for m in range(1, params.N + 1)), t=0.0)
    states = integrate_flow(params, FlowState(z=z0, t=0.0), 0.5, 0.1)
    for st in states:
        via_zeros = _monic_from_zeros(st.z)
        via_coeffs = evolve_coeffs(C, c0, st.t)
        for m in range(1, params.N + 1):
            a = via_zeros[params.N - m]
            b = via_coeffs.c[m - 1]
            assert abs(a - b) < 1e-6 * max(1.0, abs(b))
