import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from fpp.cubes import NBox
from fpp.env import (
    BLOCKED,
    DistributionSpec,
    apply_overrides,
    environment_from_weights,
    sample_environment,
)
from fpp.errors import AlphaNotAtom, CapExceeded, Disconnected, NoCertificate, NoHit, ZeroWeightPresent
from fpp.geodesics import (
    GeodesicDAG,
    attached_first_passage_time,
    boundary_hits,
    compute_safe_margin,
    count_geodesics_dp,
    enumerate_geodesics,
    f_minus_m,
    f_plus_m,
    first_passage_time,
    gamma_b_condition,
    gamma_b_probability,
    margin_box,
    pivotal_edges,
    resample_box,
    union_edges,
)
from fpp.paths import LatticePath, count_gturns, passage_time, straight_path

from oracles import brute_attached, brute_fpt, brute_geodesics, edges_of, exhaustive_geodesics, exhaustive_min, random_env

TWO = [(1, F(1, 2)), (2, F(1, 2))]
ZERO_ONE = [(0, F(3, 10)), (1, F(7, 10))]


def ones(lo=(0, 0), hi=(4, 4), spec=None):
    return environment_from_weights(len(lo), lo, hi, {}, default=1, spec=spec)


def test_all_ones_straight_geodesic():
    env = ones(hi=(6, 2))
    res = first_passage_time(env, (0, 0), (6, 0))
    assert res.value == 6
    assert res.one_geodesic == straight_path((0, 0), (6, 0))


def test_symmetry_and_disconnection():
    rng = random.Random(5)
    env = random_env(rng, 2, (0, 0), (3, 3), TWO)
    assert first_passage_time(env, (0, 0), (3, 2)).value == first_passage_time(env, (3, 2), (0, 0)).value
    cut = [(((0, 0), (1, 0)), BLOCKED), (((0, 0), (0, 1)), BLOCKED)]
    with pytest.raises(Disconnected):
        first_passage_time(apply_overrides(env, cut), (0, 0), (3, 3))


def test_one_geodesic_is_optimal_and_self_avoiding():
    rng = random.Random(9)
    for _ in range(30):
        env = random_env(rng, 2, (0, 0), (3, 3), ZERO_ONE)
        res = first_passage_time(env, (0, 0), (3, 3))
        assert res.one_geodesic.self_avoiding
        assert passage_time(env, res.one_geodesic) == res.value


def test_oracle_equivalence_small_boxes():
    rng = random.Random(1)
    for _ in range(40):
        atoms = rng.choice([TWO, ZERO_ONE])
        env = random_env(rng, 2, (0, 0), (3, 3), atoms)
        v, w = (rng.randint(0, 3), rng.randint(0, 3)), (rng.randint(0, 3), rng.randint(0, 3))
        assert first_passage_time(env, v, w).value == brute_fpt(env, v, w)


def test_margin_examples():
    spec1 = DistributionSpec.from_atoms([(1, 1)])
    env = sample_environment(spec1, ((0, 0), (5, 0)), 0)
    assert compute_safe_margin(spec1, (0, 0), (5, 0), env) == 0
    spec = DistributionSpec.from_atoms(TWO)
    env = sample_environment(spec, ((0, 0), (9, 0)), 4)
    U = passage_time(env, straight_path((0, 0), (9, 0)))
    assert compute_safe_margin(spec, (0, 0), (9, 0), env) == math.ceil((U - 9) / 2)
    spec0 = DistributionSpec.from_atoms(ZERO_ONE)
    with pytest.raises(NoCertificate):
        compute_safe_margin(spec0, (0, 0), (3, 0), sample_environment(spec0, ((0, 0), (3, 0)), 0))


def test_margin_certificate_matches_wider_box():
    spec = DistributionSpec.from_atoms(TWO)
    for seed in range(20):
        v, w = (0, 0), (8, 0)
        probe = sample_environment(spec, margin_box(v, w, 0), seed)
        m = compute_safe_margin(spec, v, w, probe)
        tight = first_passage_time(sample_environment(spec, margin_box(v, w, m), seed), v, w)
        wide = first_passage_time(sample_environment(spec, margin_box(v, w, m + 6), seed), v, w)
        assert tight.certified
        assert tight.value == wide.value


def test_restricted_flag_without_margin():
    spec = DistributionSpec.from_atoms(ZERO_ONE)
    env = sample_environment(spec, ((0, 0), (4, 0)), 1)
    assert not first_passage_time(env, (0, 0), (4, 0)).certified


def test_enumeration_examples():
    env = ones(hi=(5, 3))
    assert enumerate_geodesics(env, (0, 0), (5, 0)).count == 1
    two = enumerate_geodesics(env, (0, 0), (1, 1))
    assert two.count == 2
    assert two.union_edges == {((0, 0), (1, 0)), ((0, 0), (0, 1)), ((1, 0), (1, 1)), ((0, 1), (1, 1))}
    assert two.pivotal_edges == frozenset()


def test_enumeration_cap_saturates():
    env = ones(hi=(5, 5))
    g = enumerate_geodesics(env, (0, 0), (3, 3), cap=5)
    assert g.saturated and g.count_label() == "SATURATED"
    assert len(g.sample_paths) == 5
    exact = enumerate_geodesics(env, (0, 0), (3, 3), cap=20)
    assert exact.count == 20 and not exact.saturated


def test_dp_count_examples():
    env = ones(hi=(4, 4))
    assert count_geodesics_dp(env, (0, 0), (1, 1)) == 2
    assert count_geodesics_dp(env, (0, 0), (2, 1)) == 3
    assert count_geodesics_dp(env, (0, 0), (4, 4)) == math.comb(8, 4)
    zero = apply_overrides(env, [(((0, 0), (1, 0)), 0)])
    with pytest.raises(ZeroWeightPresent):
        count_geodesics_dp(zero, (0, 0), (1, 1))


def test_union_and_pivotal_unique_geodesic():
    env = environment_from_weights(2, (0, 0), (3, 2), {((1, 0), (2, 0)): 1}, default=1)
    env = apply_overrides(env, [(e, 3) for e in env.edges() if e[0][1] != 0 or e[1][1] != 0])
    line = straight_path((0, 0), (3, 0))
    assert union_edges(env, (0, 0), (3, 0)) == line.edge_set()
    assert pivotal_edges(env, (0, 0), (3, 0)) == line.edge_set()


def test_random_sets_match_enumeration():
    rng = random.Random(2)
    for _ in range(40):
        env = random_env(rng, 2, (0, 0), (3, 3), TWO)
        v, w = (0, rng.randint(0, 3)), (3, rng.randint(0, 3))
        t, paths = brute_geodesics(env, v, w)
        sets = [edges_of(p) for p in paths]
        dag = GeodesicDAG(env, v, w)
        assert dag.total == len(paths)
        assert dag.union() == set().union(*sets)
        assert dag.pivotal() == set.intersection(*sets)
        assert pivotal_edges(env, v, w, method="deletion") == dag.pivotal()
        assert dag.longest_length() == max(len(p) - 1 for p in paths)
        got = enumerate_geodesics(env, v, w)
        assert {p.vertices for p in got.sample_paths} == set(paths)


def test_zero_weight_sets_via_enumeration():
    rng = random.Random(3)
    for _ in range(20):
        env = random_env(rng, 2, (0, 0), (3, 2), ZERO_ONE)
        t, paths = brute_geodesics(env, (0, 0), (3, 2))
        sets = [edges_of(p) for p in paths]
        assert union_edges(env, (0, 0), (3, 2)) == set().union(*sets)
        assert pivotal_edges(env, (0, 0), (3, 2)) == set.intersection(*sets)


def test_attached_examples():
    env = ones(hi=(6, 3))
    res = attached_first_passage_time(env, (0, 0), (6, 0), F(1, 100))
    assert res.value == 6
    assert res.optimizers == [straight_path((0, 0), (6, 0))]
    rng = random.Random(4)
    env = random_env(rng, 2, (0, 0), (3, 3), TWO)
    assert attached_first_passage_time(env, (0, 0), (3, 3), 0).value == first_passage_time(env, (0, 0), (3, 3)).value


def test_attached_matches_brute_force():
    rng = random.Random(6)
    for _ in range(25):
        env = random_env(rng, 2, (0, 0), (4, 2), TWO)
        beta = rng.choice([F(1, 100), F(1, 2), F(3)])
        best, paths = brute_attached(env, (0, 0), (4, 1), beta)
        res = attached_first_passage_time(env, (0, 0), (4, 1), beta)
        assert res.value == best
        assert {p.vertices for p in res.optimizers} == set(paths)


def test_attached_cap():
    env = ones(hi=(5, 5))
    with pytest.raises(CapExceeded) as info:
        attached_first_passage_time(env, (0, 0), (5, 5), F(1, 100), cap=3)
    assert info.value.best is not None


def test_chain_inequality_small():
    rng = random.Random(8)
    beta = F(1, 100)
    for _ in range(25):
        env = random_env(rng, 2, (0, 0), (4, 2), TWO)
        v, w = (0, 1), (4, 1)
        t, O = brute_geodesics(env, v, w)
        tp, Op = brute_attached(env, v, w, beta)
        gO = min(count_gturns(env, LatticePath(p)) for p in O)
        gOp = min(count_gturns(env, LatticePath(p)) for p in Op)
        assert beta * gOp <= tp - t <= beta * gO


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), pts=st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=3, max_size=3))
def test_triangle_inequality(seed, pts):
    env = random_env(random.Random(seed), 2, (0, 0), (4, 4), TWO)
    u, v, w = pts
    t = lambda a, b: first_passage_time(env, a, b).value  # noqa: E731
    assert t(u, w) <= t(u, v) + t(v, w)
    assert t(u, v) == t(v, u)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), pick=st.integers(0, 10**6), bump=st.fractions(0, 3))
def test_monotone_under_override(seed, pick, bump):
    env = random_env(random.Random(seed), 2, (0, 0), (4, 3), TWO)
    v, w = (0, 0), (4, 3)
    t = first_passage_time(env, v, w).value
    edges = sorted(env.edges())
    e = edges[pick % len(edges)]
    raised = apply_overrides(env, [(e, env.weight(e) + bump)])
    assert first_passage_time(raised, v, w).value >= t
    union = union_edges(env, v, w)
    outside = [f for f in edges if f not in union]
    if outside:
        f = outside[pick % len(outside)]
        assert first_passage_time(apply_overrides(env, [(f, BLOCKED)]), v, w).value == t


def test_resample_box_examples():
    spec = DistributionSpec.from_atoms(TWO)
    box = ((-4, -4), (12, 4))
    env = sample_environment(spec, box, 1)
    star = sample_environment(spec, box, 2)
    far = NBox.j_box((20, 20), 2, 1)
    assert resample_box(env, star, far) == env
    B = NBox.j_box((0, 0), 2, 1)
    assert resample_box(env, env, B) == env
    mixed = resample_box(env, star, B)
    changed = {e for e in env.edges() if mixed.weight(e) != env.weight(e)}
    meeting = {e for e in env.edges() if B.meets(e)}
    assert changed <= meeting
    for e in meeting:
        assert mixed.weight(e) == star.weight(e)


def test_f_plus_minus_m_branches():
    two = DistributionSpec.from_atoms(TWO)
    assert f_plus_m(two, 10) == 2 and f_minus_m(two, 10) == 1
    uni = DistributionSpec.uniform(0, 10, 10)
    # uniform on a grid has atoms at both ends
    assert f_plus_m(uni, 5) == 1 and f_minus_m(uni, 5) == 0


def test_gamma_b_point_mass_and_violation():
    spec = DistributionSpec.from_atoms([(1, 1)])
    B = NBox.j_box((0, 0), 1, 1)
    env = sample_environment(spec, ((-1, -2), (4, 3)), 0)
    gamma = LatticePath([(1, 0), (2, 0), (2, 1), (3, 1)])
    assert gamma_b_condition(env, gamma, B, 1, 10)
    assert gamma_b_probability(spec, gamma, B, 1, 10) == 1
    broken = apply_overrides(env, [(((2, 0), (2, 1)), F(1, 2))])
    assert not gamma_b_condition(broken, gamma, B, 1, 10)
    with pytest.raises(AlphaNotAtom):
        gamma_b_condition(env, gamma, B, 2, 10)


def test_gamma_b_frequency_matches_product():
    """Frequency over 10^4 resamples lies within 4 sigma of the exact per-edge product."""
    spec = DistributionSpec.from_atoms([(1, F(1, 10)), (2, F(9, 10))])
    B = NBox.j_box((0, 0), 1, 1)  # x in [1, 2], y in [-1, 2]
    gamma = LatticePath([(1, 0), (2, 0), (2, 1)])
    p = gamma_b_probability(spec, gamma, B, 2, 10)
    R = 10**4
    hits = sum(
        gamma_b_condition(sample_environment(spec, (B.lo, B.hi), s), gamma, B, 2, 10) for s in range(R)
    )
    sigma = math.sqrt(float(p) * (1 - float(p)) / R)
    assert abs(hits / R - float(p)) <= 4 * sigma


def test_boundary_hits_examples():
    B = NBox.j_box((0, 0), 2, 1)  # x in [2, 4], y in [-2, 4]
    crossing = straight_path((0, 0), (6, 0))
    st_, fin = boundary_hits(crossing, B)
    assert st_ == (1, 0) and fin == (5, 0)
    touch = LatticePath([(0, 5), (1, 5), (1, 4), (0, 4)])
    assert boundary_hits(touch, B) == ((1, 4), (1, 4))
    with pytest.raises(NoHit):
        boundary_hits(straight_path((10, 10), (12, 10)), B)


def test_bounded_oracles_agree_with_unpruned_enumeration():
    rng = random.Random(31)
    for i in range(40):
        atoms = TWO if i % 2 else ZERO_ONE
        hi = (3, 3) if i % 4 < 2 else (1, 2, 1)
        env = random_env(rng, len(hi), (0,) * len(hi), hi, atoms)
        v = tuple(rng.randint(0, h) for h in hi)
        w = tuple(rng.randint(0, h) for h in hi)
        t, paths = brute_geodesics(env, v, w)
        assert exhaustive_min(env, v, w) == t
        assert sorted(exhaustive_geodesics(env, v, w)[1]) == sorted(paths)
