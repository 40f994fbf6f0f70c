import math
import random
from decimal import Decimal, getcontext
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fpp.cubes import NBox
from fpp.detour import (
    DEGENERATE,
    LONG,
    SHORT,
    DetourThresholds,
    _exceeds_sqrt_multiple,
    all_pass,
    choose_regime,
    construct_detour_path,
    detour_conditions,
    first_failure,
    icbrt,
    short_conditions,
)
from fpp.errors import InfeasibleGeometry
from fpp.paths import LatticePath, straight_path

from oracles import boundary_pair, long_detour_pair


def from_runs(start, runs, signs=(1, 1)):
    verts = [tuple(start)]
    cur = list(start)
    for axis, r in runs:
        for _ in range(r):
            cur[axis] += signs[axis]
            verts.append(tuple(cur))
    return LatticePath(verts)


@given(st.integers(0, 10**12))
def test_icbrt_is_floor_cube_root(x):
    k = icbrt(x)
    assert k**3 <= x < (k + 1) ** 3


@pytest.mark.parametrize("n", [1, 2, 8, 27, 64, 100, 125, 1000])
@pytest.mark.parametrize("d", [2, 3])
def test_thresholds_against_definitions(n, d):
    th = DetourThresholds.of(n, d)
    assert th.local_window**3 <= (12 * d) ** 3 * n < (th.local_window + 1) ** 3
    assert th.turn_gap**2 >= 9 * n > (th.turn_gap - 1) ** 2
    assert th.max_excess**2 <= 10**4 * d * d * n < (th.max_excess + 1) ** 2
    assert th.deep_start**2 >= 4 * d * d * n > (th.deep_start - 1) ** 2
    assert th.deep_depth**3 >= 64 * d**3 * n > (th.deep_depth - 1) ** 3
    assert 2 * th.sparse_window**2 <= n < 2 * (th.sparse_window + 1) ** 2
    assert th.short_excess**2 <= 16 * d * d * n < (th.short_excess + 1) ** 2


def test_thresholds_at_desk_scales():
    th = DetourThresholds.of(125, 2)
    assert (th.local_window, th.turn_gap, th.deep_start, th.deep_depth, th.sparse_window) == (120, 34, 45, 40, 7)
    th = DetourThresholds.of(64, 2)
    assert (th.turn_gap, th.deep_start, th.deep_depth) == (24, 32, 32)


def test_long_regime_at_125_on_sampled_pairs():
    rng = random.Random(17)
    B = NBox.j_box((0, 0), 125, 1)
    th = DetourThresholds.of(125, 2)
    for _ in range(8):
        a, b = long_detour_pair(rng, B, th)
        p = construct_detour_path(a, b, B, regime=LONG)
        res = detour_conditions(p, a, b, B)
        assert all_pass(res), (a, b, first_failure(res))


@pytest.mark.parametrize("j", [-1, 2, -2])
def test_long_regime_other_orientations(j):
    rng = random.Random(j)
    B = NBox.j_box((1, -1), 125, j)
    a, b = long_detour_pair(rng, B, DetourThresholds.of(125, 2))
    assert all_pass(detour_conditions(construct_detour_path(a, b, B), a, b, B))


def test_long_regime_infeasible_at_64():
    # index deep_start must sit at depth >= deep_depth; depth grows by at most
    # one per step, so 32 = 32 forces a straight first run, longer than turn_gap
    th = DetourThresholds.of(64, 2)
    assert th.deep_start <= th.deep_depth and th.deep_depth >= th.turn_gap
    B = NBox.j_box((0, 0), 64, 1)
    a, b = long_detour_pair(random.Random(0), B, th)
    with pytest.raises(InfeasibleGeometry):
        construct_detour_path(a, b, B, regime=LONG)


def test_long_regime_wrong_direction_is_infeasible():
    B = NBox.j_box((0, 0), 125, 1)
    with pytest.raises(InfeasibleGeometry):
        construct_detour_path((124, 50), (124, 150), B, regime=LONG)


def test_endpoints_must_be_on_outer_boundary():
    B = NBox.j_box((0, 0), 4, 1)
    with pytest.raises(ValueError):
        construct_detour_path((5, 0), (9, 0), B)
    with pytest.raises(ValueError):
        construct_detour_path((3, 0), (3, 0), B)


@pytest.mark.parametrize("n", [64, 125])
def test_short_regime_sampled_pairs(n):
    rng = random.Random(n)
    B = NBox.j_box((0, 0), n, 1)
    for _ in range(10):
        a, b = boundary_pair(rng, B)
        p = construct_detour_path(a, b, B, regime=SHORT)
        assert all_pass(short_conditions(p, a, b, B))


def test_short_regime_exhaustive_small_box():
    B = NBox.j_box((0, 0), 4, 1)
    outer = B.outer_boundary()
    infeasible = 0
    for a in outer:
        for b in outer:
            if a == b:
                continue
            try:
                p = construct_detour_path(a, b, B, regime=SHORT)
            except InfeasibleGeometry:
                # only pairs sharing their single inside neighbour have no room to turn
                ia = {v for v in B.vertices() if sum(abs(x - y) for x, y in zip(v, a)) == 1}
                ib = {v for v in B.vertices() if sum(abs(x - y) for x, y in zip(v, b)) == 1}
                assert ia == ib
                infeasible += 1
                continue
            assert all_pass(short_conditions(p, a, b, B))
    assert infeasible == 8


def test_degenerate_examples():
    B = NBox.j_box((0, 0), 4, 1)  # x in [4, 8], y in [-4, 8]
    p = construct_detour_path((3, 0), (3, 1), B, regime=DEGENERATE)
    assert len(p) == 1
    q = construct_detour_path((3, 0), (9, 2), B, regime=DEGENERATE)
    assert q.self_avoiding and len(q) == 8
    assert all(B.contains(v) or B.in_outer_boundary(v) for v in q.vertices)


def test_choose_regime():
    assert choose_regime((0, 0), (10, 0), 10, F(1, 10), 2) == LONG
    assert choose_regime((0, 0), (0, 1), 100, 1, 2) == DEGENERATE
    assert choose_regime((0, 0), (0, 1), 100, 1, math.inf) == SHORT


B125 = NBox.j_box((0, 0), 125, 1)  # x in [125, 250], y in [-125, 250]


def test_checker_catches_long_flat_run():
    # a run of 4 sqrt(n) = 45 steps along y in the middle of an otherwise regular staircase
    runs = [(0, 33), (1, 5), (0, 7), (1, 45)] + [(0, 8), (1, 10)] * 5 + [(0, 7), (1, 10), (0, 7), (1, 5), (0, 33)]
    p = from_runs((124, 50), runs)
    b = p.end
    res = detour_conditions(p, (124, 50), b, B125)
    assert res["structure"].ok and res[1].ok and res[2].ok and res[5].ok
    assert not res[3].ok
    i, j = res[3].witness
    assert j - i == 45


def test_checker_catches_crowded_turns():
    runs = [(0, 33), (1, 5), (0, 7)] + [(1, 2), (0, 2)] * 4 + [(1, 10), (0, 30), (1, 5), (0, 33)]
    p = from_runs((124, 50), runs)
    res = detour_conditions(p, (124, 50), p.end, B125)
    assert not res[4].ok and not res[7].ok
    assert res[1].ok and res[3].ok


def test_checker_catches_backtracking_and_shallow_middle():
    verts = [(124, 50)] + [(125 + i, 50) for i in range(20)] + [(144, 51)] + [(144 - i, 52) for i in range(11)]
    p = LatticePath(verts + [(134 + i, 53) for i in range(118)])
    res = detour_conditions(p, p.start, p.end, B125)
    assert not res[1].ok
    hug = from_runs((124, -120), [(0, 20), (1, 5)] * 6 + [(0, 7)])
    res = detour_conditions(hug, hug.start, hug.end, B125)
    assert not res[6].ok


def test_checker_catches_excess_length():
    B = NBox.j_box((0, 0), 30, 1)  # x in [30, 60]
    verts = [(29, 0)]
    for y in range(11):
        xs = range(30, 61) if y % 2 == 0 else range(60, 29, -1)
        verts.extend((x, y) for x in xs)
    verts.append((61, 10))
    p = LatticePath(verts)
    res = detour_conditions(p, p.start, p.end, B, n=1)
    assert res["structure"].ok
    assert not res[5].ok and res[5].witness[0] > DetourThresholds.of(1, 2).max_excess


def test_structure_checks():
    B = NBox.j_box((0, 0), 4, 1)
    p = straight_path((3, 0), (9, 0))
    assert detour_conditions(p, (3, 0), (9, 0), B)["structure"].ok
    assert not detour_conditions(p, (3, 0), (9, 1), B)["structure"].ok
    outside = LatticePath([(3, 0), (3, 1), (4, 1)])
    assert not short_conditions(outside, (3, 0), (4, 1), B)["structure"].ok
    loop = LatticePath([(3, 0), (4, 0), (5, 0), (5, 1), (4, 1), (4, 0), (3, 0)])
    assert not detour_conditions(loop, (3, 0), (3, 0), B)["structure"].ok


def test_short_checker_needs_deep_turn():
    B = NBox.j_box((0, 0), 4, 1)
    flat = straight_path((3, 0), (9, 0))
    res = short_conditions(flat, (3, 0), (9, 0), B)
    assert not res[1].ok and res[2].ok
    shallow = LatticePath([(3, 0), (4, 0), (4, 1), (5, 1), (6, 1), (7, 1), (8, 1), (9, 1)])
    assert not short_conditions(shallow, (3, 0), (9, 1), B)[1].ok


def _reference_exceeds(defect, k, d, s2):
    getcontext().prec = 80
    s = Decimal(s2.numerator) / Decimal(s2.denominator)
    return Decimal(defect) > 800 * d * (1 + s.sqrt()) * Decimal(k).sqrt()


@settings(max_examples=300, deadline=None)
@given(
    defect=st.integers(-5, 10**6),
    k=st.integers(1, 10**4),
    d=st.integers(2, 3),
    s2=st.fractions(0, 400, max_denominator=50),
)
def test_condition_two_is_exact(defect, k, d, s2):
    assert _exceeds_sqrt_multiple(defect, k, d, F(s2)) == _reference_exceeds(defect, k, d, F(s2))


def test_condition_two_boundary_cases():
    # defect equal to the bound is allowed: s = 1, k = 4 gives 800*2*2*2 = 6400
    assert not _exceeds_sqrt_multiple(6400, 4, 2, F(1))
    assert _exceeds_sqrt_multiple(6401, 4, 2, F(1))
