"""Black/white/gray classification of n-boxes and coarse-graining diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .cubes import J_BOX, NBox
from .env import BLOCKED, Environment, apply_overrides
from .errors import UncertifiedFPT, WrongKind
from .geodesics import GeodesicDAG, GeodesicSet, _certificate_floor, _dijkstra, union_edges
from .paths import LatticePath, _gturn_flags

COND1, COND2, COND3 = "Cond1", "Cond2", "Cond3"


@dataclass
class BoxClassification:
    black: bool | None = None
    white: bool | None = None
    gray: bool | None = None
    g_turn_box: bool | None = None
    failing_condition: str | None = None
    notes: list = field(default_factory=list)

    def with_white(self, white):
        gray = None if self.black is None or white is None else (self.black and white)
        return BoxClassification(self.black, white, gray, self.g_turn_box, self.failing_condition, list(self.notes))


def cond1_margin(floor, delta1, max_dist: int) -> int:
    """Enlargement ``m`` beyond which no path can undercut ``(F- + delta1) |v - w|_1``.

    A path between two points of ``B`` that leaves ``B`` widened by ``m`` has at
    least ``|v - w|_1 + 2(m + 1)`` edges, each of weight ``>= F-``.
    """
    return max(0, math.ceil(Fraction(delta1) * max_dist / (2 * Fraction(floor))) - 1)


def _fast_pair(env: Environment, B: NBox, delta1, floor, fminus):
    """First pair ``(v, w)`` in ``B`` at distance ``>= n^(1/3)`` with ``t < (F- + delta1)|v-w|_1``."""
    lo, hi = B.bounds
    max_dist = sum(b - a for a, b in zip(lo, hi))
    m = cond1_margin(floor, delta1, max_dist)
    wlo = tuple(a - m for a in lo)
    whi = tuple(b + m for b in hi)
    if not all(e1 <= a and b <= e2 for a, b, e1, e2 in zip(wlo, whi, env.lo, env.hi)):
        raise UncertifiedFPT(f"environment box does not contain the box widened by {m}")
    rate = (Fraction(fminus) + Fraction(delta1)) * env.den  # numerator units per unit distance
    n = B.n
    for v in B.vertices():
        dist, _ = _dijkstra(env, v, within=(wlo, whi))
        for w in B.vertices():
            if w <= v:
                continue
            L = sum(abs(x - y) for x, y in zip(v, w))
            if L**3 < n:
                continue
            t = dist.get(w)
            if t is not None and t < rate * L:
                return v, w
    return None


def classify_black(env: Environment, B: NBox, delta1, M) -> BoxClassification:
    """Decide blackness of ``B``.

    Condition 1 compares passage times inside ``B`` with ``(F- + delta1)|v - w|_1``
    (exact, using the widened-box certificate); condition 2 bounds the weights
    meeting ``B`` by ``M`` and condition 3 by ``F+ - 1/M``.  Which conditions
    are required depends on whether ``F+`` is finite and whether it is an atom.
    """
    spec = env.spec
    if spec is None:
        raise ValueError("classification needs the environment's distribution")
    delta1, M = Fraction(delta1), Fraction(M)
    out = BoxClassification()
    floor = _certificate_floor(env)
    if delta1 == 0 and floor >= spec.fminus:
        out.notes.append("degenerate-blackness")
        c1 = True
    else:
        if floor <= 0:
            raise UncertifiedFPT("F- = 0: passage times inside the box cannot be certified")
        witness = _fast_pair(env, B, delta1, floor, spec.fminus)
        c1 = witness is None
        if witness is not None:
            out.notes.append(f"fast pair {witness[0]}-{witness[1]}")
    weights = [env.weight(e) for e in B.edges_meeting()]
    c2 = all(w is not BLOCKED and w <= M for w in weights)
    fplus = spec.fplus
    c3 = fplus != math.inf and all(w is not BLOCKED and w <= fplus - 1 / M for w in weights)
    if fplus == math.inf:
        needed = [(COND1, c1), (COND2, c2)]
    elif spec.prob(fplus) == 0:
        needed = [(COND1, c1), (COND3, c3)]
    else:
        needed = [(COND1, c1)]
    failing = next((name for name, ok in needed if not ok), None)
    out.black = failing is None
    out.failing_condition = failing
    return out


def crosses_short(p: LatticePath, B: NBox) -> bool:
    """Some stretch of ``p`` inside ``B`` joins its two large faces."""
    if B.kind != J_BOX:
        raise WrongKind("short-direction crossings are defined for J boxes only")
    k, lo_k, hi_k = B.large_faces()
    seen_lo = seen_hi = False
    for x in p.vertices:
        if not B.contains(x):
            seen_lo = seen_hi = False
            continue
        seen_lo |= x[k] == lo_k
        seen_hi |= x[k] == hi_k
        if seen_lo and seen_hi:
            return True
    return False


def _dag_crosses(dag: GeodesicDAG, B: NBox) -> bool:
    """Some geodesic has an in-box stretch joining the two large faces."""
    k, lo_k, hi_k = B.large_faces()
    inside = [x for x in dag.nodes if B.contains(x)]  # already ordered along geodesics
    reach_lo = set()
    reach_hi = set()
    for x in inside:
        if x[k] == lo_k:
            reach_lo.add(x)
        if x[k] == hi_k:
            reach_hi.add(x)
        if (x in reach_lo and x[k] == hi_k) or (x in reach_hi and x[k] == lo_k):
            return True
        for y in dag.succ[x]:
            if B.contains(y):
                if x in reach_lo:
                    reach_lo.add(y)
                if x in reach_hi:
                    reach_hi.add(y)
    return False


def classify_white_gray(env: Environment, B: NBox, geos, black: BoxClassification | None = None) -> BoxClassification:
    """Whiteness from a geodesic set (enumerated paths or the geodesic DAG).

    A saturated enumeration with no crossing among the kept paths leaves
    ``white`` undecided (``None``).
    """
    base = black if black is not None else BoxClassification()
    if isinstance(geos, GeodesicDAG):
        white = _dag_crosses(geos, B)
    elif isinstance(geos, GeodesicSet):
        white = any(crosses_short(p, B) for p in geos.sample_paths)
        if not white and geos.saturated:
            white = None
    else:
        white = any(crosses_short(p, B) for p in geos)
    out = base.with_white(white)
    if white is None:
        out.notes.append("white-unknown")
    return out


def is_g_turn_box(env: Environment, B: NBox, optimizers) -> bool:
    """Every optimizer has a G-turn vertex inside ``B``."""
    paths = getattr(optimizers, "optimizers", optimizers)
    for p in paths:
        flags = _gturn_flags(env, p.vertices)
        if not any(f and B.contains(x) for f, x in zip(flags, p.vertices)):
            return False
    return True


@dataclass
class CoarseGrainReport:
    K_N: frozenset
    R_N: frozenset
    R_hat: frozenset
    bad_cubes: frozenset
    D_N: int


def cube_index(x, k: int):
    return tuple(c // k for c in x)


def coarse_grain(env: Environment, v, w, alpha, k: int, union=None) -> CoarseGrainReport:
    """High-weight geodesic edges and their footprint on the ``k``-cube lattice."""
    alpha = Fraction(alpha)
    R = frozenset(union if union is not None else union_edges(env, v, w))
    K = frozenset(e for e in R if env.weight(e) > alpha)
    R_hat = frozenset(cube_index(x, k) for e in R for x in e)
    near_K = set()
    d = env.d
    for e in K:
        for x in e:
            u = cube_index(x, k)
            for off in product((-1, 0, 1), repeat=d):
                near_K.add(tuple(a + b for a, b in zip(u, off)))
    bad = frozenset(u for u in R_hat if u in near_K)
    return CoarseGrainReport(K, R, R_hat, bad, len(bad))


def modified_weights(env: Environment, alpha) -> Environment:
    """Add 1 to every weight strictly above ``alpha``."""
    alpha = Fraction(alpha)
    pairs = [(e, w + 1) for e, w in env.weights().items() if w is not BLOCKED and w > alpha]
    return apply_overrides(env, pairs)
