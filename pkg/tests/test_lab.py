import math

import mpmath as mp
import numpy as np
import pytest

from hurwitzlab.decomp import parse_polynomial
from hurwitzlab.errors import BudgetError, DomainError
from hurwitzlab.hurwitz import hurwitz_zeta
from hurwitzlab.lab import (
    Continuous,
    Discrete,
    Line,
    ScanSpec,
    enumerate_shifts,
    find_zeros,
    mean_square,
    refinement_study,
    scan_shifts,
    sup_distance,
    validate_box,
)
from hurwitzlab.multizeta import CompactBox, zeta_values

import oracles

SQ = CompactBox.square(0.75 + 0j, 0.02)


def test_self_distance_one_variable():
    t = 123.4

    def own(pts):
        return hurwitz_zeta(pts[:, 0] + 1j * t, 1.0)

    assert sup_distance(1.0, t, own, SQ) < 1e-12


def test_self_distance_two_variables():
    box = CompactBox.symmetric((0.6, 0.8), 0.1, 2, grid=3)
    t = (80.0, 95.0)

    def own(pts):
        return zeta_values(pts + 1j * np.array(t), (1, 1), 95.1)

    assert sup_distance((1, 1), t, own, box) < 1e-10


def test_distance_at_origin_matches_mpmath():
    grid = SQ.points()[:, 0]
    ref = max(abs(complex(mp.zeta(complex(z)))) for z in grid)
    d = sup_distance(1.0, 0.0, 0.0, SQ)
    assert d == pytest.approx(ref, rel=1e-10)
    assert d >= abs(complex(mp.zeta(0.75))) > 1


def test_refinement_is_bounded_by_derivative():
    coarse, fine = refinement_study(1.0, 300.0, 1.0, SQ)
    assert coarse <= fine + 1e-12
    pts = CompactBox(SQ.sigma, SQ.t, 2 * SQ.grid - 1).points()[:, 0] + 300j
    slope = max(abs(complex(mp.zeta(complex(z), 1, 1))) for z in pts)
    spacing = 0.04 / (SQ.grid - 1)
    assert fine - coarse <= 1.5 * slope * spacing


def test_validate_box_warnings():
    with pytest.warns(UserWarning):
        msgs = validate_box(CompactBox.square(1.2 + 0j, 0.1))
    assert msgs
    with pytest.warns(UserWarning):
        validate_box(CompactBox.symmetric((0.6, 0.7), 0.1, 2))
    assert validate_box(CompactBox.symmetric((0.8, 0.9), 0.1, 2)) == []


def _spec(**kw):
    base = dict(alpha=(1.0,), mode=Continuous((0.5,)), t_range=(0.0, 200.0), target=1.0, box=SQ, eps=0.5)
    base.update(kw)
    return ScanSpec(**base)


def test_density_extremes_and_monotone_in_eps():
    assert scan_shifts(_spec(eps=math.inf)).density == 1.0
    assert scan_shifts(_spec(eps=0.0)).density == 0.0
    d = [scan_shifts(_spec(eps=e)).density for e in (0.2, 0.5, 1.0, 2.0)]
    assert d == sorted(d)


def test_density_shrinks_with_larger_box():
    small = CompactBox.square(0.75 + 0j, 0.02, grid=5)
    big = CompactBox.square(0.75 + 0j, 0.04, grid=9)
    assert scan_shifts(_spec(box=big)).density <= scan_shifts(_spec(box=small)).density


def test_discrete_matches_continuous_lattice():
    a = scan_shifts(_spec(mode=Continuous((0.25,)), t_range=(0.0, 100.0)))
    b = scan_shifts(_spec(mode=Discrete((0.25,)), t_range=(0.0, 100.0)))
    assert a.records == b.records
    assert a.csv_text() == b.csv_text()


def test_line_matches_continuous_diagonal():
    box = CompactBox.symmetric((0.7, 0.8), 0.05, 2, grid=2)
    common = dict(alpha=(1.0, 1.0), t_range=(0.0, 40.0), target=0.5, box=box, eps=1.0)
    line = scan_shifts(ScanSpec(mode=Line((1.0, 1.0), 5.0), **common))
    grid = scan_shifts(ScanSpec(mode=Continuous((5.0,)), **common))
    diag = [r for r in grid.records if r.shift[0] == r.shift[1]]
    assert line.records == diag
    assert all(min(r.shift) >= 40.0**0.3 for r in grid.records)


def test_joint_mode_is_stricter():
    q = parse_polynomial("1 + s1")
    single = scan_shifts(_spec(eps=1.0))
    joint = scan_shifts(_spec(eps=1.0, joint=((0.5, q),)))
    assert joint.density <= single.density
    for r, s in zip(joint.records, single.records):
        assert r.sup_distance >= s.sup_distance


def test_sampled_scan_is_reproducible():
    a = _spec(samples=300, seed=4)
    s1, s2 = enumerate_shifts(a), enumerate_shifts(a)
    assert np.array_equal(s1, s2)
    assert np.all(np.diff(s1[:, 0]) >= 0) and s1.min() >= 0 and s1.max() <= 200
    assert not np.array_equal(s1, enumerate_shifts(_spec(samples=300, seed=5)))
    assert scan_shifts(a).csv_text() == scan_shifts(a).csv_text()


def test_scan_guards():
    with pytest.raises(BudgetError):
        scan_shifts(_spec(mode=Continuous((1e-6,)), max_evaluations=1e6))
    with pytest.raises(DomainError):
        _spec(eps=-1.0)
    with pytest.raises(DomainError):
        Line((1.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        Discrete((0.0,))


def test_csv_layout():
    res = scan_shifts(_spec(t_range=(0.0, 2.0)))
    lines = res.csv_text().splitlines()
    assert lines[0] == "t_1,sup_distance,pass"
    assert len(res.records) == 5 and len(lines) == 6
    t, d, p = lines[1].split(",")
    assert float(t) == 0.0 and float(d) > 0 and p in ("0", "1")
    assert res.summary()["best"]["sup_distance"] == min(r.sup_distance for r in res.records)


def test_mean_square_guards():
    with pytest.raises(BudgetError):
        mean_square(1.0, 1, 100.0, samples=0)
    with pytest.raises(BudgetError):
        mean_square(1.0, 4, 100.0)
    with pytest.raises(DomainError):
        mean_square(1.0, 1, 5.0)


def test_mean_square_one_variable_tracks_classical_moment():
    r = mean_square(1.0, 1, 1000.0)
    # the classical formula integrates from 0; our range starts at T^0.3
    assert abs(r.ratio - oracles.classical_mean_square_ratio(1000.0)) < 0.01
    assert r.main_term == pytest.approx(1000 * math.log(1000))


def test_mean_square_two_variables_is_deterministic():
    a = mean_square((1, 1), 2, 60.0, samples=400, seed=3)
    b = mean_square((1, 1), 2, 60.0, samples=400, seed=3)
    assert a == b and a.samples == 400 and a.integral > 0


def test_zero_free_region():
    box = CompactBox(((1.5, 1.8),), ((0.0, 100.0),))
    assert find_zeros(1.0, box) == []


def test_zeros_are_certified():
    box = CompactBox(((0.55, 0.95),), ((0.0, 120.0),))
    recs = find_zeros("r:1/3", box, refine_tol=1e-10)
    assert recs
    for r in recs:
        z = r.location[0]
        assert r.residual < 1e-10
        assert r.winding == r.winding_wide == 1 and r.certified
        assert 0.55 <= z.real <= 0.95 and 0 <= z.imag <= 120
        assert abs(complex(mp.zeta(z, mp.mpf(1) / 3))) < 1e-8
    locs = [r.location[0] for r in recs]
    assert all(abs(u - v) > 1e-7 for i, u in enumerate(locs) for v in locs[i + 1:])


def test_riemann_zeros_off_line_absent():
    box = CompactBox(((0.55, 0.95),), ((10.0, 60.0),))
    assert find_zeros(1.0, box) == []
