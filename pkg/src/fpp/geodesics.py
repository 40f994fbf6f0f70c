"""Exact first passage times, geodesic sets and box resampling.

Every search here runs inside the environment's box.  When the distribution
has ``F- > 0`` a margin certificate (:func:`compute_safe_margin`) tells
whether the in-box answer equals the full-lattice answer; results carry a
``certified`` flag either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush

from .cubes import NBox
from .env import BLOCKED, Environment, apply_overrides, in_box, l1
from .errors import (
    AlphaNotAtom,
    CapExceeded,
    Disconnected,
    EdgeOutOfBox,
    NoCertificate,
    NoHit,
    SaturatedEnumeration,
    ZeroWeightPresent,
)
from .paths import LatticePath, _gturn_flags, passage_time, straight_path, turn_indices

DEFAULT_CAP = 10**6


def _dijkstra(env: Environment, source, target=None, blocked=None, within=None):
    """Label-setting shortest paths on integer numerators.

    Returns ``(dist, order)``: tentative distances and the settle order of
    every settled vertex.  Ties pop in lexicographic vertex order.
    """
    adj = env.adjacency()
    dist = {source: 0}
    order = {}
    heap = [(0, source)]
    while heap:
        dv, v = heappop(heap)
        if v in order:
            continue
        order[v] = len(order)
        if v == target:
            break
        for u, e, n in adj[v]:
            if u in order:
                continue
            if blocked is not None and e in blocked:
                continue
            if within is not None and not in_box(u, *within):
                continue
            nd = dv + n
            old = dist.get(u)
            if old is None or nd < old:
                dist[u] = nd
                heappush(heap, (nd, u))
    return dist, order


def _trace_back(env: Environment, dist, order, target) -> LatticePath:
    """Follow lexicographically smallest settled predecessors back to the source."""
    adj = env.adjacency()
    verts = [target]
    x = target
    while order[x] != 0:
        best = None
        for u, e, n in adj[x]:
            if u in order and order[u] < order[x] and dist[u] + n == dist[x]:
                if best is None or u < best:
                    best = u
        verts.append(best)
        x = best
    return LatticePath(reversed(verts))


@dataclass(frozen=True)
class FptResult:
    value: Fraction
    one_geodesic: LatticePath
    certified_box: tuple
    certified: bool

    @property
    def restricted(self) -> bool:
        return not self.certified


def _certificate_floor(env: Environment):
    """Lower bound on every edge weight of the full lattice environment."""
    if env.spec is None:
        return None
    floor = env.spec.fminus
    for w in env.overrides.values():
        if w is not BLOCKED and w < floor:
            floor = w
    return floor


def margin_for(floor, distance: int, upper) -> int:
    """Smallest ``M >= 0`` with ``floor * (distance + 2M) >= upper``.

    Any path leaving the bounding box of the endpoints widened by ``M`` has at
    least ``distance + 2M + 2`` edges and hence time above ``upper``.
    """
    floor = Fraction(floor)
    if floor <= 0:
        raise NoCertificate("F- = 0: no margin certifies the restricted passage time")
    if upper is BLOCKED:
        raise NoCertificate("reference path is blocked")
    need = Fraction(upper) / floor - distance
    return max(0, math.ceil(need / 2))


def compute_safe_margin(spec, v, w, env: Environment, upper=None) -> int:
    """Margin certificate for ``t(v, w)`` from the straight coordinate path in ``env``.

    ``upper`` overrides the reference time (for instance an attached time).
    """
    floor = spec.fminus
    for x in env.overrides.values():
        if x is not BLOCKED and x < floor:
            floor = x
    if upper is None:
        upper = passage_time(env, straight_path(v, w))
    return margin_for(floor, l1(v, w), upper)


def margin_box(v, w, margin: int):
    lo = tuple(min(a, b) - margin for a, b in zip(v, w))
    hi = tuple(max(a, b) + margin for a, b in zip(v, w))
    return lo, hi


def _box_within(inner, outer) -> bool:
    return all(o1 <= i1 and i2 <= o2 for i1, i2, o1, o2 in zip(inner[0], inner[1], outer[0], outer[1]))


def is_certified(env: Environment, v, w, upper=None) -> bool:
    floor = _certificate_floor(env)
    if floor is None:
        return False
    try:
        if upper is None:
            upper = passage_time(env, straight_path(v, w))
        m = margin_for(floor, l1(v, w), upper)
    except (NoCertificate, EdgeOutOfBox):
        return False
    return _box_within(margin_box(v, w, m), env.box)


def _require_in_box(env, *vs):
    for v in vs:
        if not env.contains(v):
            raise EdgeOutOfBox(f"vertex {v} lies outside box {env.lo}..{env.hi}")


def first_passage_time(env: Environment, v, w) -> FptResult:
    """Minimum passage time over paths inside the box, with one geodesic."""
    v, w = tuple(v), tuple(w)
    _require_in_box(env, v, w)
    dist, order = _dijkstra(env, v, target=w)
    if w not in order:
        raise Disconnected(f"{w} is unreachable from {v}")
    path = _trace_back(env, dist, order, w)
    return FptResult(Fraction(dist[w], env.den), path, env.box, is_certified(env, v, w))


def _t_num(env, v, w, blocked=None):
    dist, order = _dijkstra(env, v, target=w, blocked=blocked)
    return dist[w] if w in order else None


class GeodesicDAG:
    """Directed acyclic graph of all geodesics from ``v`` to ``w`` (positive weights).

    An edge ``<a, b>`` carries a geodesic iff ``t(v,a) + tau + t(b,w) = t(v,w)``
    for one orientation; with strictly positive weights ``t(v, .)`` increases
    along every such arc, so path counts follow by dynamic programming.
    """

    def __init__(self, env: Environment, v, w):
        v, w = tuple(v), tuple(w)
        _require_in_box(env, v, w)
        if not env.all_positive():
            raise ZeroWeightPresent("zero-weight edge present; use enumerate_geodesics")
        self.env, self.v, self.w = env, v, w
        dv, _ = _dijkstra(env, v)
        if w not in dv:
            raise Disconnected(f"{w} is unreachable from {v}")
        dw, _ = _dijkstra(env, w)
        t = dv[w]
        self.t_num = t
        adj = env.adjacency()
        nodes = [x for x in dv if x in dw and dv[x] + dw[x] == t]
        nodes.sort(key=lambda x: (dv[x], x))
        succ = {x: [] for x in nodes}
        arcs = []
        for a in nodes:
            da = dv[a]
            for b, e, n in adj[a]:
                if b in succ and da + n + dw[b] == t and da + n == dv[b]:
                    succ[a].append(b)
                    arcs.append((a, b, e))
        self.nodes = nodes
        self.succ = succ
        self.arcs = arcs
        self.dist_from = dv
        self.dist_to = dw
        c_from = {x: 0 for x in nodes}
        c_from[v] = 1
        for a in nodes:
            ca = c_from[a]
            if ca:
                for b in succ[a]:
                    c_from[b] += ca
        c_to = {x: 0 for x in nodes}
        c_to[w] = 1
        for a in reversed(nodes):
            for b in succ[a]:
                c_to[a] += c_to[b]
        self.count_from = c_from
        self.count_to = c_to
        self.total = c_from[w]

    @property
    def value(self) -> Fraction:
        return Fraction(self.t_num, self.env.den)

    def union(self) -> frozenset:
        return frozenset(e for _, _, e in self.arcs)

    def through(self, a, b) -> int:
        """Number of geodesics using the arc ``a -> b``."""
        return self.count_from[a] * self.count_to[b]

    def pivotal(self) -> frozenset:
        return frozenset(e for a, b, e in self.arcs if self.through(a, b) == self.total)

    def longest_length(self) -> int:
        """Maximum number of edges over all geodesics."""
        best = {x: None for x in self.nodes}
        best[self.v] = 0
        for a in self.nodes:
            if best[a] is None:
                continue
            for b in self.succ[a]:
                if best[b] is None or best[a] + 1 > best[b]:
                    best[b] = best[a] + 1
        return best[self.w]

    def shortest_length(self) -> int:
        best = {x: None for x in self.nodes}
        best[self.v] = 0
        for a in self.nodes:
            if best[a] is None:
                continue
            for b in self.succ[a]:
                if best[b] is None or best[a] + 1 < best[b]:
                    best[b] = best[a] + 1
        return best[self.w]


def count_geodesics_dp(env: Environment, v, w) -> int:
    return GeodesicDAG(env, v, w).total


@dataclass
class GeodesicSet:
    count: int
    saturated: bool
    union_edges: frozenset
    pivotal_edges: frozenset
    sample_paths: list = field(default_factory=list)

    def count_label(self) -> str:
        return "SATURATED" if self.saturated else str(self.count)


class _Stop(Exception):
    pass


def enumerate_geodesics(env: Environment, v, w, cap: int = DEFAULT_CAP) -> GeodesicSet:
    """Depth-first enumeration of all self-avoiding in-box geodesics.

    Prefixes are cut when ``time + F- * |x - w|_1`` exceeds ``t(v, w)``, with the
    in-box minimum weight standing in for ``F-``.  At most ``cap`` paths are
    kept; finding one more marks the set saturated.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    v, w = tuple(v), tuple(w)
    _require_in_box(env, v, w)
    t = _t_num(env, v, w)
    if t is None:
        raise Disconnected(f"{w} is unreachable from {v}")
    adj = env.adjacency()
    floor = env.floor_num()
    paths = []
    union = set()
    inter = None
    stack = [v]
    visited = {v}

    def rec(x, acc):
        nonlocal inter
        if x == w:
            if acc == t:
                if len(paths) >= cap:
                    raise _Stop
                p = LatticePath(stack)
                paths.append(p)
                es = p.edges()
                union.update(es)
                inter = set(es) if inter is None else inter.intersection(es)
            return
        for u, e, n in adj[x]:
            if u in visited:
                continue
            nacc = acc + n
            if nacc + floor * l1(u, w) > t:
                continue
            visited.add(u)
            stack.append(u)
            rec(u, nacc)
            stack.pop()
            visited.discard(u)

    saturated = False
    try:
        rec(v, 0)
    except _Stop:
        saturated = True
    return GeodesicSet(len(paths), saturated, frozenset(union), frozenset(inter or ()), paths)


def union_edges(env: Environment, v, w, cap: int = DEFAULT_CAP) -> frozenset:
    """Edges lying on at least one geodesic."""
    if env.all_positive():
        return GeodesicDAG(env, v, w).union()
    geos = enumerate_geodesics(env, v, w, cap)
    if geos.saturated:
        raise SaturatedEnumeration("zero weights present and enumeration hit its cap")
    return geos.union_edges


def pivotal_edges_by_deletion(env: Environment, v, w, candidates=None) -> frozenset:
    """Edges whose deletion strictly raises ``t(v, w)``.

    Only union edges can qualify (deleting any other edge leaves a geodesic
    intact), so the candidate list defaults to :func:`union_edges`.
    """
    v, w = tuple(v), tuple(w)
    t = _t_num(env, v, w)
    if t is None:
        raise Disconnected(f"{w} is unreachable from {v}")
    if candidates is None:
        candidates = union_edges(env, v, w)
    out = set()
    for e in candidates:
        t_del = _t_num(env, v, w, blocked={e})
        if t_del is None or t_del > t:
            out.add(e)
    return frozenset(out)


def pivotal_edges(env: Environment, v, w, method: str = "count", cap: int = DEFAULT_CAP) -> frozenset:
    """Edges lying on every geodesic.

    ``method="count"`` uses the geodesic DAG (an edge is pivotal iff every
    geodesic passes through it); ``method="deletion"`` re-solves with each
    union edge removed.  Zero weights fall back to exact enumeration.
    """
    if not env.all_positive():
        geos = enumerate_geodesics(env, v, w, cap)
        if geos.saturated:
            raise SaturatedEnumeration("zero weights present and enumeration hit its cap")
        return geos.pivotal_edges
    if method == "count":
        return GeodesicDAG(env, v, w).pivotal()
    if method == "deletion":
        return pivotal_edges_by_deletion(env, v, w)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class AttachedResult:
    value: Fraction
    optimizers: list
    explored: int


def attached_first_passage_time(env: Environment, v, w, beta, cap: int = 10**7) -> AttachedResult:
    """Exact minimum of ``t + beta * #G-turns`` over self-avoiding in-box paths.

    Branch and bound: prefixes are cut when ``t(prefix) + F- * |x - w|_1`` exceeds
    the best complete value found so far (initially the attached time of one
    ordinary geodesic).  Every optimizer is returned.  Exploring more than
    ``cap`` prefixes raises :class:`CapExceeded` with the best value so far.
    """
    v, w = tuple(v), tuple(w)
    _require_in_box(env, v, w)
    beta = Fraction(beta)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    scale_den = math.lcm(env.den, beta.denominator)
    wscale = scale_den // env.den
    bnum = int(beta * scale_den)
    base = first_passage_time(env, v, w).one_geodesic
    best = sum(n for n in _nums(env, base.vertices)) * wscale + bnum * sum(_gturn_flags(env, base.vertices))
    adj = env.adjacency()
    floor = env.floor_num() * wscale
    optimizers = []
    stack = [v]
    visited = {v}
    explored = 0

    def rec(x, acc):
        nonlocal best, explored, optimizers
        explored += 1
        if explored > cap:
            raise CapExceeded(f"explored more than {cap} prefixes", Fraction(best, scale_den), optimizers)
        if x == w:
            val = acc + bnum * sum(_gturn_flags(env, stack)) if bnum else acc
            if val < best:
                best = val
                optimizers = [LatticePath(stack)]
            elif val == best:
                optimizers.append(LatticePath(stack))
            return
        for u, e, n in adj[x]:
            if u in visited:
                continue
            nacc = acc + n * wscale
            if nacc + floor * l1(u, w) > best:
                continue
            visited.add(u)
            stack.append(u)
            rec(u, nacc)
            stack.pop()
            visited.discard(u)

    rec(v, 0)
    return AttachedResult(Fraction(best, scale_den), optimizers, explored)


def _nums(env, verts):
    return [env.num((a, b) if a < b else (b, a)) for a, b in zip(verts, verts[1:])]


def resample_box(env: Environment, env_star: Environment, B: NBox) -> Environment:
    """``tau^B``: weights of ``env_star`` on edges meeting ``B``, ``env`` elsewhere."""
    pairs = [(e, env_star.weight(e)) for e in env.edges() if B.meets(e)]
    return apply_overrides(env, pairs)


def f_plus_m(spec, M) -> Fraction:
    M = Fraction(M)
    fplus = spec.fplus
    if fplus == math.inf:
        return M
    if spec.prob(fplus) == 0:
        return fplus - 1 / M**2
    return fplus


def f_minus_m(spec, M) -> Fraction:
    M = Fraction(M)
    fminus = spec.fminus
    if spec.prob(fminus) == 0:
        return fminus + 1 / M**2
    return fminus


def gamma_b_clauses(env_star: Environment, gamma: LatticePath, B: NBox, alpha, M) -> dict:
    """Evaluate the three clauses of the (gamma, B)-condition separately."""
    spec = env_star.spec
    alpha = Fraction(alpha)
    if spec is None:
        raise ValueError("environment carries no distribution")
    if spec.prob(alpha) == 0:
        raise AlphaNotAtom(f"P(tau = {alpha}) = 0")
    verts = gamma.vertices
    lo_m, hi_m = f_minus_m(spec, M), f_plus_m(spec, M)
    turn_adjacent = set()
    reflected = set()
    for i in turn_indices(verts):
        a, x, b = verts[i - 1], verts[i], verts[i + 1]
        r = tuple(p + q - s for p, s, q in zip(a, x, b))
        turn_adjacent.update({_ek(a, x), _ek(x, b)})
        reflected.update({_ek(a, r), _ek(r, b)})
    path_edges = set(gamma.edges())
    c1 = all(env_star.weight(e) == alpha for e in turn_adjacent | reflected)
    c2 = all(env_star.weight(e) <= lo_m for e in path_edges - turn_adjacent)
    others = [e for e in B.edges_meeting() if e not in path_edges and e not in reflected]
    c3 = all(env_star.weight(e) >= hi_m for e in others)
    return {1: c1, 2: c2, 3: c3}


def gamma_b_condition(env_star: Environment, gamma: LatticePath, B: NBox, alpha, M) -> bool:
    return all(gamma_b_clauses(env_star, gamma, B, alpha, M).values())


def gamma_b_probability(spec, gamma: LatticePath, B: NBox, alpha, M) -> Fraction:
    """Exact probability of the (gamma, B)-condition as a product over edges."""
    alpha = Fraction(alpha)
    verts = gamma.vertices
    lo_m, hi_m = f_minus_m(spec, M), f_plus_m(spec, M)
    fixed = set()
    for i in turn_indices(verts):
        a, x, b = verts[i - 1], verts[i], verts[i + 1]
        r = tuple(p + q - s for p, s, q in zip(a, x, b))
        fixed.update({_ek(a, x), _ek(x, b), _ek(a, r), _ek(r, b)})
    path_edges = set(gamma.edges())
    lower = path_edges - fixed
    upper = [e for e in B.edges_meeting() if e not in path_edges and e not in fixed]
    p_alpha = spec.prob(alpha)
    p_low = spec.cdf(lo_m)
    p_high = 1 - spec.cdf(hi_m) + spec.prob(hi_m)
    return p_alpha ** len(fixed) * p_low ** len(lower) * p_high ** len(upper)


def _ek(a, b):
    return (a, b) if a < b else (b, a)


def boundary_hits(p: LatticePath, B: NBox):
    """First and last vertices of ``p`` on the outer boundary of ``B``."""
    hits = [x for x in p.vertices if B.in_outer_boundary(x)]
    if not hits:
        raise NoHit("path never touches the outer boundary of the box")
    return hits[0], hits[-1]
