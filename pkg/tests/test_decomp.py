import json
import time
from fractions import Fraction

import numpy as np
import pytest

from hurwitzlab.decomp import (
    MonomialTableau,
    Polynomial,
    Slot,
    decompose,
    parse_polynomial,
    verify_tableau,
)
from hurwitzlab.errors import ArityError, DomainError
from hurwitzlab.multizeta import CompactBox

BOX2 = CompactBox.symmetric((0.55, 0.95), 1.0, 2)


def rows(t: MonomialTableau):
    """(owner, coefficient, exponent) per slot, 1-based m order."""
    return [(s.owner, s.coeff, s.exponent) for s in t.slots]


# ------------------------------------------------------------ grammar


@pytest.mark.parametrize(
    "text, arity, terms",
    [
        ("s2+s1+s1^2*s2^2", 2, {(0, 1): 1, (1, 0): 1, (2, 2): 1}),
        ("1 + s1*s2*s3", 3, {(0, 0, 0): 1, (1, 1, 1): 1}),
        ("2.5*s1^3 - s2", 2, {(3, 0): 2.5, (0, 1): -1}),
        ("(1+2i)*s1 + 3i", 1, {(1,): 1 + 2j, (0,): 3j}),
        ("i*s1*s1", 1, {(2,): 1j}),
        ("s1 - s1 + s2", 2, {(0, 1): 1}),
        ("-(2-i)*s4^2", 4, {(0, 0, 0, 2): -2 + 1j}),
    ],
)
def test_parse(text, arity, terms):
    p = parse_polynomial(text)
    assert p.arity == arity
    assert {e: c for c, e in p.terms} == {e: complex(c) for e, c in terms.items()}


@pytest.mark.parametrize("bad", ["", "s9", "s1^-1", "s1^1.5", "s1 +", "(s1+1)*s2", "x1", "s1**2", "2 3", "(3)^2"])
def test_parse_rejects(bad):
    with pytest.raises(DomainError):
        parse_polynomial(bad)


def test_parse_arity():
    assert parse_polynomial("s1", 3).arity == 3
    with pytest.raises(ArityError):
        parse_polynomial("s3", 2)


def test_str_round_trip():
    for text in ("s2+s1+s1^2*s2^2", "-2*s1 - 3*s2^3 + (1+2i)*s3", "1.5 - s1*s1", "0.25i*s2"):
        p = parse_polynomial(text)
        assert parse_polynomial(str(p), p.arity) == p


def test_evaluation():
    p = parse_polynomial("s2+s1+s1^2*s2^2")
    z = np.array([[0.7 + 0.2j, 0.6 - 0.4j]])
    s1, s2 = z[0]
    assert p(z)[0] == pytest.approx(s2 + s1 + s1**2 * s2**2, abs=1e-15)


# ------------------------------------------------------------ reference tableaux


def test_first_table():
    q = parse_polynomial("s2+s1+s1^2*s2^2")
    t = decompose(q, C=10.0, box=BOX2)
    B = t.B
    assert B == 64
    expected = [
        (2, -1 / B, 1), (1, B, 0), (2, 1 / B, 1), (1, -B, 0), (2, -1 / B, 0), (1, B, 1),
        (2, 1 / B, 0), (1, -B, 1), (2, -1 / B, 2), (1, B, 2), (2, 1 / B, 2),
    ]
    assert t.M == 11
    assert rows(t) == expected
    rep = verify_tableau(t, q, C=10.0, box=BOX2)
    assert rep.passed and rep.box_conditions is True


def test_second_table():
    p = parse_polynomial("1 + s1*s2*s3")
    t = decompose(p, scale=False)
    expected = [
        (3, -1, 0), (2, -1, 0), (1, 1, 0), (2, 1, 0), (3, 1, 0), (1, -1, 0),
        (3, -1, 1), (2, -1, 1), (1, 1, 1), (2, 1, 1), (3, 1, 1),
    ]
    assert t.B == 1 and rows(t) == expected
    rep = verify_tableau(t, p)
    assert rep.reconstructs and rep.tails_vanish and rep.prefix_monomial
    assert rep.box_conditions is None


def test_zero_polynomial_and_arity():
    t = decompose(parse_polynomial("s1 - s1", 2))
    assert t.M == 0
    assert verify_tableau(t, Polynomial(2, ())).reconstructs
    with pytest.raises(ArityError):
        decompose(parse_polynomial("s1 + 1"))


# ------------------------------------------------------------ verification


def test_corrupted_slot_is_located():
    p = parse_polynomial("1 + s1*s2*s3")
    t = decompose(p, scale=False)
    slots = list(t.slots)
    slots[6] = Slot(3, -slots[6].coeff, slots[6].exponent)
    rep = verify_tableau(MonomialTableau(3, tuple(slots), 1), p)
    assert not rep.passed
    assert rep.failing_tail == [3]


def test_wrong_target_fails_reconstruction():
    t = decompose(parse_polynomial("s1 + s2"), scale=False)
    assert not verify_tableau(t, parse_polynomial("s1 + 2*s2")).reconstructs


def test_small_scale_fails_box_check():
    q = parse_polynomial("s2+s1+s1^2*s2^2")
    t = decompose(q, scale=False)
    rep = verify_tableau(t, q, C=10.0, box=BOX2)
    assert rep.reconstructs and rep.box_conditions is False


def _random_poly(rng, n):
    L = int(rng.integers(1, 5))
    terms = []
    for _ in range(L):
        e = tuple(int(k) for k in rng.integers(0, 4, n))
        re, im = rng.integers(-6, 7, 2)
        c = complex(Fraction(int(re), 4), Fraction(int(im), 4)) if re or im else 1 + 0j
        terms.append((c, e))
    return Polynomial.from_terms(n, terms)


def test_random_polynomials_round_trip():
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    checked = 0
    while checked < 100:
        n = int(rng.integers(2, 4))
        p = _random_poly(rng, n)
        if p.is_zero:
            continue
        box = CompactBox.symmetric((0.55, 0.95), 1.0, n)
        t = decompose(p, C=2.0, box=box)
        assert t.M == 2 * n * len(p.terms) - 1
        assert all(1 <= s.owner <= n for s in t.slots)
        rep = verify_tableau(t, p, C=2.0, box=box)
        assert rep.passed, (str(p), rep.to_dict())
        raw = verify_tableau(decompose(p, scale=False), p)
        assert raw.reconstructs and raw.tails_vanish and raw.prefix_monomial
        checked += 1
    assert time.perf_counter() - start < 10


def test_json_round_trip_is_exact():
    q = parse_polynomial("(0.1+0.3i)*s2 + s1 - 7*s1^2*s2^3")
    t = decompose(q, C=3.0, box=BOX2)
    text = t.to_json()
    doc = json.loads(text)
    assert doc["B"] == t.B and len(doc["slots"]) == t.M
    assert {"m", "j_m", "coefficient", "exponent"} <= set(doc["slots"][0])
    back = MonomialTableau.from_json(text)
    assert back == t
    assert verify_tableau(back, q).reconstructs
