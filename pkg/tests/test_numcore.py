import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hurwitzlab.errors import DomainError, PoleError
from hurwitzlab.numcore import (
    DEFAULT_CUTOFF,
    SmoothCutoff,
    beta,
    composite_rule,
    gamma,
    loggamma,
    mb_kernel,
    phi_eval,
    phi_mellin,
    phi_mellin_continued,
)

from oracles import gamma as mp_gamma


def test_gamma_basic_values():
    assert gamma(1) == pytest.approx(1.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)


@pytest.mark.parametrize("z", [0, -1, -7, -3 + 1e-13])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        gamma(z)


@pytest.mark.parametrize("z", [0.3 + 0.1j, 5.5 - 3j, -4.5 + 0.2j, 2 + 45j, 30 + 30j, -20.3 + 5j, 0.5 + 48j])
def test_gamma_against_mpmath(z):
    assert abs(gamma(z) / mp_gamma(z) - 1) < 1e-12


def test_gamma_large_imaginary_part_stays_finite():
    import mpmath as mp

    v = loggamma(0.5 + 500j)
    assert np.isfinite(v)
    ref = mp.loggamma(mp.mpc(0.5, 500))
    assert abs(v.real - float(ref.real)) < 1e-10
    # imaginary parts agree modulo 2 pi
    d = (v.imag - float(ref.imag)) / (2 * math.pi)
    assert abs(d - round(d)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    if abs(z) > 20 or min(abs(z - k) for k in range(-21, 1)) < 1e-3:
        return
    assert abs(gamma(z + 1) - z * gamma(z)) <= 1e-11 * abs(z * gamma(z))


def test_beta_examples():
    assert beta(1, 2) == pytest.approx(0.5, rel=1e-14)
    s = 3 + 4j
    assert abs(beta(1, s) - 1 / s) < 1e-14


def test_mb_kernel_symmetry_and_product():
    rng = np.random.default_rng(7)
    for _ in range(50):
        z = complex(*rng.uniform(-3, 3, 2))
        s = complex(*rng.uniform(-3, 3, 2))
        lhs = mb_kernel(z, s) * gamma(s)
        rhs = gamma(z) * gamma(s - z)
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)
        assert abs(mb_kernel(z, s) - mb_kernel(s - z, s)) <= 1e-12 * abs(mb_kernel(z, s))


def test_beta_log_space_at_large_height():
    # Gamma(1/2 + 300 i) underflows around 1e-204, the ratio does not
    z, s = 0.7 + 300j, 1.5 + 310j
    ref = mp_gamma(z) * mp_gamma(s - z) / mp_gamma(s)
    assert abs(mb_kernel(z, s) / ref - 1) < 1e-9


def test_cutoff_plateau_and_support_exact():
    x = np.linspace(0, 2, 101)
    assert np.all(phi_eval(DEFAULT_CUTOFF, x) == 1.0)
    assert np.all(DEFAULT_CUTOFF(np.linspace(3, 50, 101)) == 0.0)
    assert phi_eval(DEFAULT_CUTOFF, 1.0) == 1.0
    assert phi_eval(DEFAULT_CUTOFF, 10.0) == 0.0


def test_cutoff_bridge_smooth_and_monotone():
    v = DEFAULT_CUTOFF(2.5)
    assert 0 < v < 1
    x = np.linspace(2, 3, 2001)
    y = DEFAULT_CUTOFF(x)
    assert np.all(np.diff(y) <= 0)
    # finite-difference slope is continuous across 2.5
    h = 1e-5
    d = lambda u: (DEFAULT_CUTOFF(u + h) - DEFAULT_CUTOFF(u - h)) / (2 * h)
    assert abs(d(2.5 - 1e-4) - d(2.5 + 1e-4)) < 1e-6 * 1e3
    assert abs(d(2.5) - float(DEFAULT_CUTOFF.derivative(2.5))) < 1e-6


def test_cutoff_derivative_matches_finite_difference():
    x = np.linspace(2.01, 2.99, 37)
    h = 1e-6
    fd = (DEFAULT_CUTOFF(x + h) - DEFAULT_CUTOFF(x - h)) / (2 * h)
    assert np.max(np.abs(fd - DEFAULT_CUTOFF.derivative(x))) < 1e-7


def test_cutoff_rejects_negative():
    with pytest.raises(DomainError):
        phi_eval(DEFAULT_CUTOFF, -0.1)
    with pytest.raises(DomainError):
        SmoothCutoff(2.0, 2.0)


def test_phi_mellin_at_one_matches_symmetric_bridge():
    # the bridge is symmetric about 2.5, so the transition mass is exactly 1/2
    assert abs(phi_mellin(DEFAULT_CUTOFF, 1) - 2.5) < 1e-10


def _mp_phi(x):
    import mpmath as mp

    if x <= 2:
        return mp.mpf(1)
    if x >= 3:
        return mp.mpf(0)
    u = x - 2
    f = lambda v: mp.e ** (-1 / v)
    return f(1 - u) / (f(u) + f(1 - u))


def test_phi_mellin_high_resolution_oracle():
    import mpmath as mp

    for z in (2.0, 0.5 + 3j, 1.3 - 7j):
        ref = mp.quad(lambda x: x ** (mp.mpc(z) - 1) * _mp_phi(x), [0, 2, 2.25, 2.5, 2.75, 3])
        assert abs(phi_mellin(DEFAULT_CUTOFF, z) - complex(ref)) < 1e-10


def test_phi_mellin_bracket_and_domain():
    v = phi_mellin(DEFAULT_CUTOFF, 2)
    assert 2 < v.real < 4.5 and v.imag == 0
    with pytest.raises(DomainError):
        phi_mellin(DEFAULT_CUTOFF, 0.0)
    with pytest.raises(DomainError):
        phi_mellin(DEFAULT_CUTOFF, -1 + 2j)


def test_continued_mellin_agrees_in_half_plane():
    z = np.array([0.3 + 1j, 1.0, 2.5 - 40j, 4 + 100j])
    cont = phi_mellin_continued(DEFAULT_CUTOFF, z)
    direct = np.array([phi_mellin(DEFAULT_CUTOFF, w) for w in z])
    assert np.max(np.abs(cont - direct)) < 1e-10
    with pytest.raises(PoleError):
        phi_mellin_continued(DEFAULT_CUTOFF, 0)


def test_composite_rule_integrates_oscillation():
    x, w = composite_rule(0.0, 10.0, 40, 16)
    assert abs(np.sum(w * np.cos(7 * x)) - math.sin(70) / 7) < 1e-13
