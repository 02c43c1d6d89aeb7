import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

import oracles

from hurwitzlab.errors import BudgetError, CompatibilityError, DomainError, UnimodularError
from hurwitzlab.hurwitz import character_table
from hurwitzlab.multizeta import zeta_trunc
from hurwitzlab.twist import (
    SIEVE_CAP,
    TwistFunction,
    WeylTargetSpec,
    factorize,
    integer_table,
    make_twist,
    partial_sum_growth,
    threshold_for,
    twist_value,
    twist_values,
    twisted_zeta_trunc,
    weyl_set_measure,
)

CHI4 = [c for c in character_table(4) if not c.principal][0]
THIRD = Fraction(1, 3)


def test_factorize_reassembles():
    rng = np.random.default_rng(0)
    for n in list(rng.integers(1, 10**6, 200)) + [2**38 + 15, 999_983 * 999_979]:
        f = factorize(int(n))
        assert math.prod(p**e for p, e in f.items()) == n
        assert all(all(p % r for r in range(2, min(p, 2000))) for p in f)
    with pytest.raises(BudgetError):
        factorize(SIEVE_CAP**2)


def test_make_twist_checks():
    assert threshold_for(100) == 5
    with pytest.raises(CompatibilityError):
        make_twist(THIRD, character_table(3)[1], 100)
    with pytest.raises(CompatibilityError):
        make_twist(THIRD, character_table(4)[0], 100)
    with pytest.raises(UnimodularError):
        make_twist(THIRD, CHI4, 100, {3: 1.5})
    with pytest.raises(DomainError):
        make_twist(THIRD, CHI4, 100, {7: 1j})
    with pytest.raises(DomainError):
        make_twist(0.3, CHI4, 100, {9: 1j})


def test_rational_twist_is_unimodular_and_multiplicative():
    tw = make_twist(THIRD, CHI4, 100, {3: cmath.exp(0.7j), 2: -1})
    vals = twist_values(tw, 20_000)
    assert np.max(np.abs(np.abs(vals) - 1)) < 1e-12
    rng = np.random.default_rng(1)
    for m, n in rng.integers(1, 3000, (200, 2)):
        m, n = int(m), int(n)
        assert abs(tw.integer_value(m * n) - tw.integer_value(m) * tw.integer_value(n)) < 1e-12
    table = integer_table(tw, 5000)
    for n in rng.integers(1, 5001, 100):
        assert abs(table[n] - tw.integer_value(int(n))) < 1e-12
    for k in (0, 1, 17, 4000):
        assert abs(twist_value(tw, k) - vals[k]) < 1e-12


def test_rational_tail_follows_character():
    tw = make_twist(THIRD, CHI4, 100)
    for p in (5, 7, 11, 13, 101, 103):
        assert tw.prime_value(p) == CHI4(p)
    assert tw.prime_value(2) == 1 and tw.prime_value(3) == 1
    # 1/3: a(k + 1/3) = a(3k + 1) / a(3)
    assert abs(twist_value(tw, 2) - CHI4(7)) < 1e-15


def test_transcendental_twist():
    tw = make_twist(0.3, CHI4, 100, {1: 1j, 4: -1})
    vals = twist_values(tw, 40)
    assert vals[0] == 1 and vals[1] == 1j and vals[4] == -1
    k = np.arange(5, 41)
    assert np.allclose(vals[5:], np.exp(2j * np.pi * k / 4), atol=1e-15)


def test_alternating_hand_sum():
    # q = 2 with threshold 0 gives a(k + alpha) = (-1)^k
    tw = make_twist(0.5, character_table(2)[0], 1)
    s = 2.0
    hand = 0.5**-2 - 1.5**-2 + 2.5**-2 - 3.5**-2
    assert abs(twisted_zeta_trunc((s,), (0.5,), [tw], 3) - hand) < 1e-15


def test_trivial_twist_is_truncation():
    s, a = (0.7 + 3j, 1.2 - 2j, 0.9 + 1j), (0.25, 0.5, 1.5)
    assert abs(twisted_zeta_trunc(s, a, [None] * 3, 60) - zeta_trunc(s, a, 60)) < 1e-12


def test_twisted_truncation_brute_force():
    s, a = (0.8 + 2j, 1.1 - 1j), (THIRD, THIRD)
    t1 = make_twist(THIRD, CHI4, 100, {2: 1j})
    t2 = make_twist(THIRD, CHI4, 30)
    v1, v2 = twist_values(t1, 30), twist_values(t2, 30)
    x = np.arange(31) + 1 / 3
    ref = sum(v1[i] * x[i] ** -s[0] * v2[j] * x[j] ** -s[1] for i in range(31) for j in range(i + 1, 31))
    assert abs(twisted_zeta_trunc(s, a, [t1, t2], 30) - ref) < 1e-12
    with pytest.raises(CompatibilityError):
        twisted_zeta_trunc(s, (0.25, THIRD), [t1, t2], 30)


def test_growth_exponents():
    tw = make_twist(THIRD, CHI4, 100)
    rep = partial_sum_growth(tw, 100_000)
    assert len(rep.checkpoints) >= 12
    assert rep.beta < 0.5
    flat = make_twist(0.3, character_table(1)[0], 1)
    assert partial_sum_growth(flat, 10_000).beta == pytest.approx(1.0, abs=0.02)
    with pytest.raises(DomainError):
        partial_sum_growth(tw, 50)


def test_json_round_trip():
    tw = make_twist(THIRD, CHI4, 100, {3: cmath.exp(0.2j)})
    back = TwistFunction.from_json(tw.to_json())
    assert back.to_json() == tw.to_json()
    assert np.array_equal(twist_values(back, 500), twist_values(tw, 500))


def test_sieve_budget():
    tw = make_twist(THIRD, CHI4, 100)
    with pytest.raises(BudgetError):
        twist_values(tw, SIEVE_CAP)


def test_weyl_measure():
    full = WeylTargetSpec(delta=1.0, N=3, theta={})
    assert weyl_set_measure(0.3, full, 1e5, samples=5000) == 1.0
    prev = 0.0
    for d in (0.2, 0.4, 0.6, 0.8):
        m = weyl_set_measure(0.3, WeylTargetSpec(delta=d, N=1.5, theta={0: 0.1, 1: 0.6}), 1e5, 20_000, seed=2)
        assert m >= prev
        prev = m
    # two rationally independent frequencies: density near delta^2
    m = weyl_set_measure(0.3, WeylTargetSpec(delta=0.5, N=1.5, theta={}), 1e5, 100_000)
    assert abs(m - 0.25) < 0.01
    with pytest.raises(DomainError):
        WeylTargetSpec(delta=0.0, N=3)
    with pytest.raises(DomainError):
        weyl_set_measure(0.3, full, 1e5, samples=10)


def test_generating_series_factorises():
    # sum a(k) k^-s = prod over free primes (1 - chi(p) p^-s) / (1 - a(p) p^-s) * L(s, chi)
    s = 2.5
    tw = make_twist(THIRD, CHI4, 100, {2: 1j, 3: -1})
    n = np.arange(1, 10**6 + 1)
    lhs = complex(np.sum(integer_table(tw, 10**6)[1:] * n**-s))
    factor = 1.0
    for p in tw.free_primes:
        factor *= (1 - CHI4(p) * p**-s) / (1 - tw.prime_value(p) * p**-s)
    L = complex(oracles.dirichlet_L(s, CHI4.values))
    assert abs(lhs - factor * L) < 1e-6


def test_shift_relation_on_thousand_indices():
    tw = make_twist(THIRD, CHI4, 100, {2: 1j})
    vals = twist_values(tw, 999)
    ref = [tw.integer_value(3 * k + 1) / tw.integer_value(3) for k in range(1000)]
    assert np.max(np.abs(vals - np.array(ref))) < 1e-12
