"""Path algebra: passage times, turns, reflections, G-turns and attached times."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .env import BLOCKED, Environment, l1
from .errors import EdgeOutOfBox, IndexOutOfRange


class LatticePath:
    """A nearest-neighbour vertex sequence ``(x_0, ..., x_l)``.

    Repeated vertices are allowed (the result of a G-turn swap may be a walk);
    :attr:`self_avoiding` records whether there are none.
    """

    __slots__ = ("vertices", "self_avoiding")

    def __init__(self, vertices):
        verts = tuple(tuple(int(c) for c in v) for v in vertices)
        if not verts:
            raise ValueError("a path needs at least one vertex")
        for a, b in zip(verts, verts[1:]):
            if len(a) != len(b) or l1(a, b) != 1:
                raise ValueError(f"consecutive vertices {a}, {b} are not adjacent")
        self.vertices = verts
        self.self_avoiding = len(set(verts)) == len(verts)

    def __len__(self):
        """Number of edges."""
        return len(self.vertices) - 1

    def __getitem__(self, i):
        return self.vertices[i]

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other):
        if isinstance(other, LatticePath):
            return self.vertices == other.vertices
        return NotImplemented

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"LatticePath({format_path(self)})"

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def edges(self):
        return [(a, b) if a < b else (b, a) for a, b in zip(self.vertices, self.vertices[1:])]

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def __add__(self, other):
        """Concatenation ``self ⊕ other``; requires ``self.end == other.start``."""
        if self.end != other.start:
            raise ValueError("paths do not share the junction vertex")
        return LatticePath(self.vertices + other.vertices[1:])


def format_path(p) -> str:
    return " ".join("(" + ",".join(str(c) for c in v) + ")" for v in p)


def parse_path(text: str) -> LatticePath:
    tokens = text.replace(")", ") ").split()
    verts = []
    buf = ""
    for tok in tokens:
        buf += tok
        if buf.endswith(")"):
            verts.append(tuple(int(x) for x in buf.strip("()").split(",") if x))
            buf = ""
    if buf:
        raise ValueError(f"unterminated vertex {buf!r}")
    return LatticePath(verts)


def _nums_along(env: Environment, verts):
    out = []
    for a, b in zip(verts, verts[1:]):
        out.append(env.num((a, b) if a < b else (b, a)))
    return out


def passage_time(env: Environment, p):
    """Exact sum of the edge weights of ``p`` (BLOCKED if any edge is)."""
    verts = p.vertices if isinstance(p, LatticePath) else tuple(p)
    nums = _nums_along(env, verts)
    if any(n is None for n in nums):
        return BLOCKED
    return Fraction(sum(nums), env.den)


def reflect(p: LatticePath, i: int):
    """``x_i* = x_{i-1} + x_{i+1} - x_i``; endpoints reflect to themselves."""
    verts = p.vertices
    if not 0 <= i < len(verts):
        raise IndexOutOfRange(f"index {i} outside 0..{len(verts) - 1}")
    if i == 0 or i == len(verts) - 1:
        return verts[i]
    a, x, b = verts[i - 1], verts[i], verts[i + 1]
    return tuple(u + w - v for u, v, w in zip(a, x, b))


class Turn(enum.Enum):
    FLAT = "flat"
    TURN = "turn"
    GTURN = "gturn"


@dataclass(frozen=True)
class TurnClassification:
    labels: tuple
    reflections: tuple

    def turn_indices(self):
        return [i for i, t in enumerate(self.labels) if t is not Turn.FLAT]

    def gturn_indices(self):
        return [i for i, t in enumerate(self.labels) if t is Turn.GTURN]

    @property
    def n_gturns(self) -> int:
        return sum(1 for t in self.labels if t is Turn.GTURN)


def is_turn(verts, i: int) -> bool:
    """Interior index whose incoming and outgoing steps are perpendicular."""
    if i <= 0 or i >= len(verts) - 1:
        return False
    a, x, b = verts[i - 1], verts[i], verts[i + 1]
    # unit steps are perpendicular iff they change different coordinates
    return next(k for k in range(len(x)) if a[k] != x[k]) != next(k for k in range(len(x)) if b[k] != x[k])


def turn_indices(verts):
    return [i for i in range(1, len(verts) - 1) if is_turn(verts, i)]


def _gturn_flags(env: Environment, verts):
    """Per interior index: True for a G-turn.  Requires only the weights involved."""
    on_path = set(verts)
    flags = [False] * len(verts)
    for i in range(1, len(verts) - 1):
        if not is_turn(verts, i):
            continue
        a, x, b = verts[i - 1], verts[i], verts[i + 1]
        r = tuple(u + w - v for u, v, w in zip(a, x, b))
        if r in on_path:
            continue
        n1 = env.num((a, x) if a < x else (x, a))
        n2 = env.num((x, b) if x < b else (b, x))
        n3 = env.num((a, r) if a < r else (r, a))
        n4 = env.num((r, b) if r < b else (b, r))
        if None in (n1, n2) or None in (n3, n4):
            # a blocked side can only match a blocked side; BLOCKED sums never equal
            continue
        flags[i] = n1 + n2 == n3 + n4
    return flags


def classify_turns(env: Environment, p: LatticePath) -> TurnClassification:
    """Label each index flat, turn or G-turn (exact weight equality)."""
    verts = p.vertices
    flags = _gturn_flags(env, verts)
    labels = []
    refl = []
    for i in range(len(verts)):
        if flags[i]:
            labels.append(Turn.GTURN)
        elif is_turn(verts, i):
            labels.append(Turn.TURN)
        else:
            labels.append(Turn.FLAT)
        refl.append(reflect(p, i) if 0 < i < len(verts) - 1 else None)
    return TurnClassification(tuple(labels), tuple(refl))


def count_gturns(env: Environment, p) -> int:
    verts = p.vertices if isinstance(p, LatticePath) else tuple(p)
    return sum(_gturn_flags(env, verts))


def attached_path_time(env: Environment, p, beta):
    """``t(p) + beta * #G-turns(p)``."""
    t = passage_time(env, p)
    if t is BLOCKED:
        return BLOCKED
    return t + Fraction(beta) * count_gturns(env, p)


def swap_g_turns(env: Environment, p: LatticePath, subset) -> LatticePath:
    """Replace ``x_i`` by its reflection for every ``i`` in ``subset``.

    ``subset`` must consist of G-turn indices no two of which are consecutive;
    two adjacent corners cannot both be flipped without breaking the path.
    The returned walk has the same passage time as ``p``; check
    ``result.self_avoiding`` before treating it as a path.
    """
    subset = sorted(set(subset))
    if not subset:
        return p
    verts = list(p.vertices)
    flags = _gturn_flags(env, p.vertices)
    for i in subset:
        if not 0 < i < len(verts) - 1 or not flags[i]:
            raise ValueError(f"index {i} is not a G-turn of the path")
    for i, k in zip(subset, subset[1:]):
        if k - i < 2:
            raise ValueError(f"G-turn indices {i} and {k} are consecutive")
    for i in subset:
        verts[i] = reflect(p, i)
    return LatticePath(verts)


def admissible_full_swap(gturns) -> list:
    """Greedy ascending subset of G-turn indices with no two consecutive."""
    chosen = []
    for i in sorted(gturns):
        if not chosen or i - chosen[-1] >= 2:
            chosen.append(i)
    return chosen


def straight_path(v, w) -> LatticePath:
    """Coordinate path from ``v`` to ``w``: axis 1 first, then axis 2, and so on."""
    verts = [tuple(v)]
    cur = list(v)
    for k in range(len(v)):
        step = 1 if w[k] > cur[k] else -1
        while cur[k] != w[k]:
            cur[k] += step
            verts.append(tuple(cur))
    return LatticePath(verts)


def check_in_box(env: Environment, p: LatticePath):
    for e in p.edges():
        if not env.has_edge(e):
            raise EdgeOutOfBox(f"edge {e} of the path has no endpoint in the box")
