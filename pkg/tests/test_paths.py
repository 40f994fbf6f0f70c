import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fpp.env import BLOCKED, apply_overrides, environment_from_weights
from fpp.errors import IndexOutOfRange
from fpp.paths import (
    LatticePath,
    Turn,
    admissible_full_swap,
    attached_path_time,
    classify_turns,
    count_gturns,
    format_path,
    parse_path,
    passage_time,
    reflect,
    straight_path,
    swap_g_turns,
)

from oracles import brute_geodesics, random_env

L_PATH = LatticePath([(0, 0), (1, 0), (1, 1)])


def flat_env(lo=(-2, -2), hi=(4, 4), w=1):
    return environment_from_weights(2, lo, hi, {}, default=w)


def test_single_vertex_path_time_zero():
    assert passage_time(flat_env(), LatticePath([(0, 0)])) == 0


def test_three_edge_time_exact():
    env = environment_from_weights(
        2, (0, 0), (3, 0), {((0, 0), (1, 0)): 1, ((1, 0), (2, 0)): F(3, 2), ((2, 0), (3, 0)): 2}, default=7
    )
    assert passage_time(env, straight_path((0, 0), (3, 0))) == F(9, 2)


def test_blocked_edge_gives_blocked_time():
    env = apply_overrides(flat_env(), [(((0, 0), (1, 0)), BLOCKED)])
    assert passage_time(env, L_PATH) is BLOCKED


def test_non_adjacent_vertices_rejected():
    with pytest.raises(ValueError):
        LatticePath([(0, 0), (1, 1)])


def test_reflect_examples():
    assert reflect(L_PATH, 1) == (0, 1)
    assert reflect(L_PATH, 0) == (0, 0)
    flat = straight_path((0, 0), (2, 0))
    assert reflect(flat, 1) == (1, 0)
    with pytest.raises(IndexOutOfRange):
        reflect(L_PATH, 3)


def test_uniform_corner_is_g_turn():
    tc = classify_turns(flat_env(), L_PATH)
    assert tc.labels == (Turn.FLAT, Turn.GTURN, Turn.FLAT)
    assert tc.reflections[1] == (0, 1)


def test_straight_path_has_no_turns():
    tc = classify_turns(flat_env(), straight_path((0, 0), (3, 0)))
    assert tc.turn_indices() == []


def test_unequal_detour_is_plain_turn():
    env = environment_from_weights(2, (-2, -2), (4, 4), {((0, 0), (0, 1)): 5}, default=1)
    tc = classify_turns(env, L_PATH)
    # 1 + 1 against 5 + 1
    assert tc.labels[1] is Turn.TURN


def test_reflection_on_path_is_not_g_turn():
    # U-shaped path: the reflection of (1,1) is (0,1), which lies on the path
    p = LatticePath([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert classify_turns(flat_env(), p).labels[2] is Turn.TURN


def test_attached_time_examples():
    env = flat_env()
    assert attached_path_time(env, L_PATH, 0) == passage_time(env, L_PATH)
    assert attached_path_time(env, L_PATH, F(1, 100)) == 2 + F(1, 100)


def test_swap_examples():
    env = flat_env()
    assert swap_g_turns(env, L_PATH, []) == L_PATH
    q = swap_g_turns(env, L_PATH, {1})
    assert q.vertices == ((0, 0), (0, 1), (1, 1))
    assert passage_time(env, q) == passage_time(env, L_PATH)


def test_swap_rejects_non_gturn_and_consecutive():
    env = flat_env()
    stair = LatticePath([(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)])
    assert classify_turns(env, stair).gturn_indices() == [1, 2, 3]
    with pytest.raises(ValueError):
        swap_g_turns(env, stair, {1, 2})
    with pytest.raises(ValueError):
        swap_g_turns(env, L_PATH, {0})
    assert admissible_full_swap([1, 2, 3]) == [1, 3]
    q = swap_g_turns(env, stair, {1, 3})
    assert passage_time(env, q) == passage_time(env, stair)


def test_format_parse_round_trip():
    p = LatticePath([(0, 0, 0), (0, 1, 0), (-1, 1, 0)])
    assert parse_path(format_path(p)) == p


def test_concatenation():
    p1 = straight_path((0, 0), (2, 0))
    p2 = straight_path((2, 0), (2, 2))
    env = flat_env()
    assert passage_time(env, p1 + p2) == passage_time(env, p1) + passage_time(env, p2)
    with pytest.raises(ValueError):
        p2 + p1


walks = st.lists(st.sampled_from([(1, 0), (-1, 0), (0, 1), (0, -1)]), min_size=0, max_size=8)


def _walk(start, steps):
    verts = [start]
    for s in steps:
        verts.append((verts[-1][0] + s[0], verts[-1][1] + s[1]))
    return LatticePath(verts)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6), s1=walks, s2=walks)
def test_passage_time_additive(seed, s1, s2):
    env = random_env(random.Random(seed), 2, (-17, -17), (17, 17), [(F(1, 2), F(1, 3)), (3, F(2, 3))])
    p1 = _walk((0, 0), s1)
    p2 = _walk(p1.end, s2)
    assert passage_time(env, p1 + p2) == passage_time(env, p1) + passage_time(env, p2)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6), steps=walks, beta=st.fractions(0, 1))
def test_attached_at_least_plain(seed, steps, beta):
    env = random_env(random.Random(seed), 2, (-9, -9), (9, 9), [(1, F(1, 2)), (2, F(1, 2))])
    p = _walk((0, 0), steps)
    t = passage_time(env, p)
    ta = attached_path_time(env, p, beta)
    assert ta >= t
    assert (ta == t) == (beta == 0 or count_gturns(env, p) == 0)
    assert attached_path_time(env, p, 0) == t


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**6), steps=walks)
def test_reflection_involution(seed, steps):
    p = _walk((0, 0), steps)
    for i in range(1, len(p)):
        q = LatticePath(p.vertices[:i] + (reflect(p, i),) + p.vertices[i + 1:])
        assert reflect(q, i) == p[i]


def test_swaps_preserve_time_on_random_optimal_paths():
    """All singleton and full admissible swaps of every optimal path, 100 environments."""
    rng = random.Random(11)
    checked = 0
    for _ in range(100):
        env = random_env(rng, 2, (0, 0), (3, 3), [(1, F(1, 2)), (2, F(1, 2))])
        t, paths = brute_geodesics(env, (0, 0), (3, 3))
        for verts in paths:
            p = LatticePath(verts)
            g = classify_turns(env, p).gturn_indices()
            if len(g) > 20:
                continue
            subsets = [[i] for i in g] + [admissible_full_swap(g)]
            for sub in subsets:
                assert passage_time(env, swap_g_turns(env, p, sub)) == t
                checked += 1
    assert checked > 100
