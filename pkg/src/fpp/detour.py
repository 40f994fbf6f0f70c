"""Planted detour paths through an n-box and an independent condition checker.

Three regimes:

* ``LONG``: a self-avoiding path with interior in ``B`` satisfying seven
  geometric conditions (local geodesy, near geodesy, regular turns, separated
  turns, bounded excess length, deep middle section, sparse turns).
* ``SHORT``: interior in ``B``, at least one turn at depth >= 2, excess length
  at most ``4d sqrt(n)``.
* ``DEGENERATE``: the lexicographically smallest shortest path inside
  ``B ∪ ∂⁺B``.

Every threshold involving ``sqrt(n)`` or ``n^(1/3)`` is decided by an exact
integer inequality, never by a rounded root.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .cubes import NBox
from .env import l1
from .errors import InfeasibleGeometry
from .paths import LatticePath, is_turn, turn_indices

LONG = "Long"
SHORT = "Short"
DEGENERATE = "Degenerate"
REGIMES = (LONG, SHORT, DEGENERATE)


def icbrt(x: int) -> int:
    """Largest integer ``k`` with ``k**3 <= x`` (``x >= 0``)."""
    k = int(round(x ** (1 / 3)))
    while k**3 > x:
        k -= 1
    while (k + 1) ** 3 <= x:
        k += 1
    return k


@dataclass(frozen=True)
class DetourThresholds:
    """Integer forms of the geometric thresholds at scale ``n`` in dimension ``d``.

    Each field is the exact integer cut-off of a real inequality, e.g.
    ``turn_gap`` is the least ``k`` with ``k >= 3 sqrt(n)``.
    """

    n: int
    d: int
    local_window: int  # max |i-j| with |i-j| <= 12 d n^(1/3)
    turn_gap: int  # least |i-j| with |i-j| >= 3 sqrt(n)
    turn_sep: int  # turns must be at L1 distance > turn_sep
    max_excess: int  # max |path| - |a-b| with excess <= 100 d sqrt(n)
    deep_start: int  # least i with i >= 2 d sqrt(n)
    deep_depth: int  # least depth with depth >= 4 d n^(1/3)
    sparse_window: int  # max |i-j| with |i-j| <= sqrt(n/2)
    short_excess: int  # max excess with excess <= 4 d sqrt(n)

    @classmethod
    def of(cls, n: int, d: int):
        return cls(
            n=n,
            d=d,
            local_window=icbrt((12 * d) ** 3 * n),
            turn_gap=math.isqrt(9 * n - 1) + 1,
            turn_sep=4,
            max_excess=math.isqrt(10**4 * d * d * n),
            deep_start=math.isqrt(4 * d * d * n - 1) + 1,
            deep_depth=icbrt(64 * d**3 * n - 1) + 1,
            sparse_window=math.isqrt(n // 2),
            short_excess=math.isqrt(16 * d * d * n),
        )


def choose_regime(a, b, n: int, delta1, fplus) -> str:
    """Regime prescribed for the pair ``(a, b)`` given ``delta1`` and ``F+``."""
    dist = l1(a, b)
    if fplus == math.inf:
        return SHORT if dist >= 1 else DEGENERATE
    if dist >= Fraction(delta1) * n / (2 * Fraction(fplus)) + 1:
        return LONG
    return DEGENERATE


def _check_endpoints(a, b, B: NBox):
    if a == b:
        raise ValueError("endpoints coincide")
    for v in (a, b):
        if not B.in_outer_boundary(v):
            raise ValueError(f"{v} is not on the outer boundary of the box")


def construct_detour_path(a, b, B: NBox, n: int | None = None, regime: str = LONG) -> LatticePath:
    """Build the planted path from ``a`` to ``b`` (both on ``∂⁺B``) in the given regime.

    Raises :class:`InfeasibleGeometry` when no path meeting the regime's
    conditions exists (Long: no monotone staircase qualifies; Short: no
    candidate corner qualifies).
    """
    a, b = tuple(a), tuple(b)
    n = B.n if n is None else n
    _check_endpoints(a, b, B)
    if regime == LONG:
        return _long_path(a, b, B, DetourThresholds.of(n, B.d))
    if regime == SHORT:
        return _short_path(a, b, B, DetourThresholds.of(n, B.d))
    if regime == DEGENERATE:
        return _degenerate_path(a, b, B)
    raise ValueError(f"unknown regime {regime!r}")


def _long_path(a, b, B: NBox, th: DetourThresholds) -> LatticePath:
    """Search monotone staircases run by run.

    A monotone path has ``|x_i - x_j|_1 = |i - j|`` for all pairs, so local
    geodesy, near geodesy and the length bound hold automatically; turns of a
    staircase sit at L1 distance equal to their index gap.  What remains is a
    choice of run lengths: every gap between consecutive turns (or an endpoint)
    below ``turn_gap``, interior runs longer than ``turn_sep``, any three
    consecutive turns spanning more than ``sparse_window``, interior vertices in
    ``B`` and the middle section deep enough.  Failed states are memoised on
    ``(vertex, axis, capped last run, first run?)``.
    """
    d = len(a)
    m = l1(a, b)
    ka, sa = B.exit_axis(a)
    kb, sb = B.exit_axis(b)
    sign = [(y > x) - (y < x) for x, y in zip(a, b)]
    if sign[ka] != sa or sign[kb] != -sb:
        raise InfeasibleGeometry("no monotone path enters the box from a and leaves it at b")
    max_run = th.turn_gap - 1
    min_run = th.turn_sep + 1
    cap = th.sparse_window + 1
    lo_idx, hi_idx = th.deep_start, m - th.deep_start

    def run_ok(x, i, q, r):
        """Vertices x_{i+1}..x_{i+r} of a run along axis q are admissible."""
        y = list(x)
        for step in range(1, r + 1):
            y[q] += sign[q]
            idx = i + step
            if idx == m:
                return True
            v = tuple(y)
            if not B.contains(v):
                return False
            if lo_idx <= idx <= hi_idx and B.depth(v) < th.deep_depth:
                return False
        return True

    lo_b, hi_b = B.bounds
    deep_lo = [c + th.deep_depth - 1 for c in lo_b]
    deep_hi = [c - th.deep_depth + 1 for c in hi_b]

    def reachable(x, i, idx):
        """Some monotone continuation from ``x`` (at index ``i``) is deep at index ``idx``."""
        lo_sum = hi_sum = 0
        for q in range(d):
            span = abs(b[q] - x[q])
            ends = sorted((x[q], x[q] + sign[q] * span))
            lo_q, hi_q = max(ends[0], deep_lo[q]), min(ends[1], deep_hi[q])
            if lo_q > hi_q:
                return False
            steps = sorted((abs(lo_q - x[q]), abs(hi_q - x[q])))
            lo_sum += steps[0]
            hi_sum += steps[1]
        return lo_sum <= idx - i <= hi_sum

    def hopeless(x, i):
        return any(i <= idx <= hi_idx and not reachable(x, i, idx) for idx in (lo_idx, hi_idx))

    failed = set()
    runs = []

    def rec(x, i, axis, last, first):
        key = (x, axis, min(last, cap), first)
        if key in failed:
            return False
        if hopeless(x, i):
            failed.add(key)
            return False
        rem = [abs(bb - xx) for xx, bb in zip(x, b)]
        # spread each axis evenly over the runs the busiest axis still needs
        n_runs = max(-(-r // max_run) for r in rem if r)
        for q in range(d):
            if q == axis or rem[q] == 0:
                continue
            if rem[q] == m - i:
                # only axis q left: this is the final run
                if q == kb and rem[q] <= max_run and run_ok(x, i, q, rem[q]):
                    runs.append((q, rem[q]))
                    return True
                continue
            top = min(max_run, rem[q])
            room = rem[q]
            if i < hi_idx:
                # progress along q that still fits inside the deep band
                edge_q = deep_hi[q] if sign[q] > 0 else deep_lo[q]
                room = max(min_run, min(room, sign[q] * (edge_q - x[q])))
            target = -(-room // n_runs)
            lengths = sorted(range(min_run, top + 1), key=lambda r: (abs(r - target), -r))
            for r in lengths:
                if not first and r + last <= th.sparse_window:
                    continue
                if not run_ok(x, i, q, r):
                    continue
                y = x[:q] + (x[q] + sign[q] * r,) + x[q + 1:]
                runs.append((q, r))
                if rec(y, i + r, q, r, False):
                    return True
                runs.pop()
        failed.add(key)
        return False

    found = False
    for r in range(min(max_run, abs(b[ka] - a[ka])), 0, -1):
        if not run_ok(a, 0, ka, r):
            continue
        y = a[:ka] + (a[ka] + sa * r,) + a[ka + 1:]
        runs.append((ka, r))
        if y == b or rec(y, r, ka, r, True):
            found = True
            break
        runs.pop()
    if not found:
        raise InfeasibleGeometry(f"no staircase from {a} to {b} meets the long-regime conditions at n={th.n}")
    verts = [a]
    cur = list(a)
    for q, r in runs:
        for _ in range(r):
            cur[q] += sign[q]
            verts.append(tuple(cur))
    return LatticePath(verts)


def _bfs(start, allowed, d):
    dist = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for k in range(d):
            for s in (-1, 1):
                y = x[:k] + (x[k] + s,) + x[k + 1:]
                if y not in dist and allowed(y):
                    dist[y] = dist[x] + 1
                    queue.append(y)
    return dist


def _descend(start, dist, d):
    """Greedy walk to the distance source via lexicographically smallest neighbours.

    ``dist`` is a mapping or a callable returning ``None`` off the region.
    """
    get = dist if callable(dist) else dist.get
    verts = [start]
    x = start
    while get(x) > 0:
        here = get(x)
        x = min(y for y in _nbrs(x, d) if get(y) == here - 1)
        verts.append(x)
    return verts


def _short_path(a, b, B: NBox, th: DetourThresholds) -> LatticePath:
    """Shortest-first search over corners ``c`` at depth >= 2.

    For each corner, in order of the shortest route length through it, join a
    shortest route ``a -> u`` and ``w -> b`` where ``u -> c -> w`` bends.  The
    box is convex and each endpoint touches it across a single face, so route
    lengths inside it are plain L1 distances.
    """
    d = len(a)
    lo, hi = B.bounds

    def inside(v):
        return all(p <= x <= q for x, p, q in zip(v, lo, hi))

    def dist_to(src):
        return lambda v: l1(src, v) if inside(v) or v == src else None

    da, db = dist_to(a), dist_to(b)
    base = l1(a, b)
    budget = base + th.short_excess
    core = product(*(range(p + 1, q) for p, q in zip(lo, hi)))  # depth >= 2
    cands = sorted((t, c) for c in core for t in [l1(a, c) + l1(b, c)] if t <= budget)
    for _, c in cands:
        ins = [u for u in _nbrs(c, d) if da(u) == da(c) - 1 and (inside(u) or u == a)]
        outs = [w for w in _nbrs(c, d) if db(w) == db(c) - 1 and (inside(w) or w == b)]
        for u in sorted(ins):
            for w in sorted(outs):
                if _axis(u, c) == _axis(c, w):
                    continue
                head = list(reversed(_descend(u, da, d)))
                tail = _descend(w, db, d)
                verts = head + [c] + tail
                if len(set(verts)) == len(verts):
                    return LatticePath(verts)
    raise InfeasibleGeometry("no short detour with a deep turn fits the length budget")


def _nbrs(x, d):
    return [x[:k] + (x[k] + s,) + x[k + 1:] for k in range(d) for s in (-1, 1)]


def _axis(u, v):
    return next(k for k in range(len(u)) if u[k] != v[k])


def _degenerate_path(a, b, B: NBox) -> LatticePath:
    d = len(a)
    allowed = lambda v: B.contains(v) or B.in_outer_boundary(v)  # noqa: E731
    db = _bfs(b, allowed, d)
    if a not in db:
        raise InfeasibleGeometry("endpoints are not connected through the box and its boundary")
    return LatticePath(_descend(a, db, d))


@dataclass(frozen=True)
class ConditionResult:
    ok: bool
    witness: tuple | None = None
    note: str = ""


def _structure(p: LatticePath, a, b, B: NBox):
    verts = p.vertices
    if verts[0] != tuple(a) or verts[-1] != tuple(b):
        return ConditionResult(False, (verts[0], verts[-1]), "wrong endpoints")
    if not p.self_avoiding:
        return ConditionResult(False, None, "path revisits a vertex")
    for i, v in enumerate(verts[1:-1], start=1):
        if not B.contains(v):
            return ConditionResult(False, (i,), "interior vertex outside the box")
    return ConditionResult(True)


def _exceeds_sqrt_multiple(defect: int, k: int, d: int, s2) -> bool:
    """``defect > 800 d (1 + s) sqrt(k)`` with ``s = sqrt(s2)``, decided exactly."""
    if defect <= 0:
        return False
    r2 = Fraction(defect, 800 * d) ** 2
    # r <= (1 + s) sqrt(k)  <=>  r^2/k - 1 - s^2 <= 2 s
    lhs = r2 / k - 1 - s2
    if lhs <= 0:
        return False
    return lhs * lhs > 4 * s2


def detour_conditions(p: LatticePath, a, b, B: NBox, n: int | None = None, delta1=None, fplus=None) -> dict:
    """Check each long-regime condition on an arbitrary path; ``{key: ConditionResult}``.

    Keys ``1``-``7`` are the seven geometric conditions; ``"structure"``
    covers endpoints, self-avoidance and interior membership.  Condition 2
    uses ``C = 800d(1 + (delta1 / 2F+)^(-1/2))``; without ``delta1`` and
    ``fplus`` it falls back to the strictest constant ``C = 800d``.
    Witnesses are index pairs ``(i, j)`` or single indices.
    """
    n = B.n if n is None else n
    d = B.d
    th = DetourThresholds.of(n, d)
    verts = p.vertices
    m = len(verts) - 1
    out = {"structure": _structure(p, a, b, B)}

    res = ConditionResult(True)
    for i in range(m + 1):
        for j in range(i + 1, min(m, i + th.local_window) + 1):
            if l1(verts[i], verts[j]) != j - i:
                res = ConditionResult(False, (i, j))
                break
        if not res.ok:
            break
    out[1] = res

    if delta1 is None or fplus is None or fplus == math.inf:
        s2 = Fraction(0)
        note = "C = 800d"
    else:
        s2 = 2 * Fraction(fplus) / Fraction(delta1)
        note = f"C = 800d(1 + sqrt({s2}))"
    res = ConditionResult(True, None, note)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            if _exceeds_sqrt_multiple(j - i - l1(verts[i], verts[j]), j - i, d, s2):
                res = ConditionResult(False, (i, j), note)
                break
        if not res.ok:
            break
    out[2] = res

    turns = turn_indices(verts)
    marks = [0] + turns + [m]
    res = ConditionResult(True)
    for i, j in zip(marks, marks[1:]):
        if j - i >= th.turn_gap:
            res = ConditionResult(False, (i, j))
            break
    out[3] = res

    res = ConditionResult(True)
    for x, p_ in enumerate(turns):
        for q in turns[x + 1:]:
            if l1(verts[p_], verts[q]) <= th.turn_sep:
                res = ConditionResult(False, (p_, q))
                break
        if not res.ok:
            break
    out[4] = res

    excess = m - l1(a, b)
    out[5] = ConditionResult(excess <= th.max_excess, None if excess <= th.max_excess else (excess,))

    res = ConditionResult(True)
    for i in range(th.deep_start, m - th.deep_start + 1):
        if B.depth(verts[i]) < th.deep_depth:
            res = ConditionResult(False, (i,))
            break
    out[6] = res

    res = ConditionResult(True)
    for x in range(len(turns) - 2):
        if turns[x + 2] - turns[x] <= th.sparse_window:
            res = ConditionResult(False, (turns[x], turns[x + 2]))
            break
    out[7] = res
    return out


def short_conditions(p: LatticePath, a, b, B: NBox, n: int | None = None) -> dict:
    """Check the short-regime conditions: a turn at depth >= 2 and the length budget."""
    n = B.n if n is None else n
    th = DetourThresholds.of(n, B.d)
    verts = p.vertices
    out = {"structure": _structure(p, a, b, B)}
    deep = [i for i in range(1, len(verts) - 1) if is_turn(verts, i) and B.depth(verts[i]) >= 2]
    out[1] = ConditionResult(bool(deep), (deep[0],) if deep else None)
    excess = len(p) - l1(a, b)
    out[2] = ConditionResult(excess <= th.short_excess, None if excess <= th.short_excess else (excess,))
    return out


def all_pass(results: dict) -> bool:
    return all(r.ok for r in results.values())


def first_failure(results: dict):
    for key, r in results.items():
        if not r.ok:
            return key, r
    return None
