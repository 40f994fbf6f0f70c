"""Exact edge-weight environments on finite boxes of Z^d.

Weights are exact rationals (:class:`fractions.Fraction`) or the symbol
:data:`BLOCKED`.  Internally an :class:`Environment` keeps every weight as an
integer numerator over one shared denominator, so shortest-path code can add
plain ints without ever rounding.

Sampling is counter-mode: the weight of an edge is a pure function of
``(seed, canonical edge)``, so two boxes sampled with the same seed agree on
every shared edge.
"""
from __future__ import annotations

import hashlib
import math
import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from types import MappingProxyType

from .errors import EdgeOutOfBox, MissingCriticalProbability, ParseError, ValidationError

ATOMS = "atoms"
UNIFORM = "uniform_scaled_int"

_TWO64 = 1 << 64


class _Blocked:
    """Deleted edge; compares above every finite weight."""

    __slots__ = ()

    def __repr__(self):
        return "BLOCKED"

    __str__ = __repr__

    def __reduce__(self):
        return "BLOCKED"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("BLOCKED")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


BLOCKED = _Blocked()


def as_weight(x):
    """Coerce ``x`` (int, Fraction, ``"num/den"`` or ``"BLOCKED"``) to a weight."""
    if x is BLOCKED or x == "BLOCKED":
        return BLOCKED
    if isinstance(x, float):
        raise TypeError("floating point weights are not accepted; use 'num/den'")
    w = Fraction(x)
    if w < 0:
        raise ValueError(f"negative weight {x!r}")
    return w


def format_weight(w) -> str:
    if w is BLOCKED:
        return "BLOCKED"
    w = Fraction(w)
    return f"{w.numerator}/{w.denominator}"


def l1(u, v) -> int:
    return sum(abs(a - b) for a, b in zip(u, v))


def edge(u, v):
    """Canonical (sorted) representation of the undirected edge ``<u, v>``."""
    u = tuple(u)
    v = tuple(v)
    if len(u) != len(v) or l1(u, v) != 1:
        raise ValueError(f"{u} and {v} are not lattice neighbours")
    return (u, v) if u < v else (v, u)


def unit(d: int, k: int, s: int = 1):
    return tuple(s if i == k else 0 for i in range(d))


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


DEFAULT_PC_TABLE = {2: (Fraction(1, 2), None)}


@dataclass(frozen=True)
class DistributionSpec:
    """Law of a single edge weight.

    ``kind`` is ``"atoms"`` (finite list of ``(value, probability)``) or
    ``"uniform_scaled_int"`` (uniform on ``{lo, ..., hi} / den``).
    ``pc_table`` maps a dimension to ``(p_c, directed p_c)``; either entry may
    be ``None`` when unknown.  Only ``p_c(2) = 1/2`` is built in.
    """

    kind: str
    d: int = 2
    atoms: tuple = ()
    int_range: tuple | None = None
    pc_table: dict = field(default_factory=lambda: dict(DEFAULT_PC_TABLE), hash=False)

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("dimension must be at least 2")
        if self.kind == ATOMS:
            atoms = tuple(sorted((as_weight(w), Fraction(p)) for w, p in self.atoms))
            if not atoms:
                raise ValidationError("atom list is empty")
            if any(w is BLOCKED for w, _ in atoms):
                raise ValidationError("BLOCKED cannot be an atom")
            if len({w for w, _ in atoms}) != len(atoms):
                raise ValidationError("atom weights must be distinct")
            if any(p <= 0 for _, p in atoms):
                raise ValidationError("atom probabilities must be positive")
            if sum(p for _, p in atoms) != 1:
                raise ValidationError(f"atom probabilities sum to {sum(p for _, p in atoms)}, not 1")
            object.__setattr__(self, "atoms", atoms)
        elif self.kind == UNIFORM:
            if self.int_range is None:
                raise ValidationError("uniform_scaled_int needs int_range=(lo, hi, den)")
            lo, hi, den = (int(x) for x in self.int_range)
            if not 0 <= lo <= hi or den <= 0:
                raise ValidationError(f"bad int_range {self.int_range}")
            object.__setattr__(self, "int_range", (lo, hi, den))
        else:
            raise ValidationError(f"unknown distribution kind {self.kind!r}")
        table = {}
        for dim, entry in dict(self.pc_table).items():
            pc, pcd = entry
            table[int(dim)] = (None if pc is None else Fraction(pc), None if pcd is None else Fraction(pcd))
        object.__setattr__(self, "pc_table", table)

    @classmethod
    def from_atoms(cls, atoms, d=2, pc_table=None):
        return cls(ATOMS, d=d, atoms=tuple(atoms), pc_table=dict(pc_table or DEFAULT_PC_TABLE))

    @classmethod
    def uniform(cls, lo, hi, den, d=2, pc_table=None):
        return cls(UNIFORM, d=d, int_range=(lo, hi, den), pc_table=dict(pc_table or DEFAULT_PC_TABLE))

    @cached_property
    def den(self) -> int:
        """Common denominator of every support point."""
        if self.kind == UNIFORM:
            return self.int_range[2]
        return math.lcm(*(w.denominator for w, _ in self.atoms))

    @property
    def fminus(self) -> Fraction:
        if self.kind == UNIFORM:
            return Fraction(self.int_range[0], self.int_range[2])
        return self.atoms[0][0]

    @property
    def fplus(self) -> Fraction:
        # both supported kinds are bounded; an unbounded law would return math.inf
        if self.kind == UNIFORM:
            return Fraction(self.int_range[1], self.int_range[2])
        return self.atoms[-1][0]

    def prob(self, x) -> Fraction:
        """P(tau = x)."""
        x = Fraction(x)
        if self.kind == UNIFORM:
            lo, hi, den = self.int_range
            num = x * den
            if num.denominator == 1 and lo <= num <= hi:
                return Fraction(1, hi - lo + 1)
            return Fraction(0)
        return sum((p for w, p in self.atoms if w == x), Fraction(0))

    def cdf(self, x) -> Fraction:
        """P(tau <= x)."""
        x = Fraction(x)
        if self.kind == UNIFORM:
            lo, hi, den = self.int_range
            top = math.floor(x * den)
            if top < lo:
                return Fraction(0)
            return Fraction(min(top, hi) - lo + 1, hi - lo + 1)
        return sum((p for w, p in self.atoms if w <= x), Fraction(0))

    def support(self):
        if self.kind == UNIFORM:
            lo, hi, den = self.int_range
            return [Fraction(k, den) for k in range(lo, hi + 1)]
        return [w for w, _ in self.atoms]

    @cached_property
    def _sampler(self):
        if self.kind == UNIFORM:
            return None
        q = math.lcm(*(p.denominator for _, p in self.atoms))
        cum = 0
        cuts = []
        for _, p in self.atoms[:-1]:
            cum += p.numerator * (q // p.denominator)
            cuts.append(-((-cum * _TWO64) // q))  # ceil(cum * 2^64 / q)
        nums = [int(w * self.den) for w, _ in self.atoms]
        return cuts, nums

    def num_from_u64(self, u: int) -> int:
        """Map a uniform 64-bit integer to a weight numerator over :attr:`den`."""
        if self.kind == UNIFORM:
            lo, hi, _ = self.int_range
            return lo + ((u * (hi - lo + 1)) >> 64)
        cuts, nums = self._sampler
        return nums[bisect_right(cuts, u)]

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == ATOMS:
            out["atoms"] = [[format_weight(w), format_weight(p)] for w, p in self.atoms]
        else:
            out["int_range"] = list(self.int_range)
        return out


def derived_stats(spec: DistributionSpec):
    """Return ``(F-, F+, F(F-))``: support infimum, supremum and P(tau <= F-)."""
    return spec.fminus, spec.fplus, spec.cdf(spec.fminus)


def is_useful(spec: DistributionSpec) -> bool:
    """Usefulness: finite mean and F(F-) below the (directed) critical probability."""
    if spec.d not in spec.pc_table:
        raise MissingCriticalProbability(f"no critical probabilities configured for d={spec.d}")
    pc, pc_directed = spec.pc_table[spec.d]
    fminus, _, at_fminus = derived_stats(spec)
    threshold = pc if fminus == 0 else pc_directed
    if threshold is None:
        which = "p_c" if fminus == 0 else "directed p_c"
        raise MissingCriticalProbability(f"{which}({spec.d}) is not configured")
    # bounded support: every moment is finite
    return at_fminus < threshold


def moment_hypotheses(spec: DistributionSpec) -> dict:
    """Moment conditions used by the limit theorems; bounded laws satisfy all of them."""
    bounded = spec.fplus != math.inf
    return {"finite_mean": bounded, "finite_second_moment": bounded, "finite_moment_above_2(d-1)": bounded}


def _edge_u64(seed: int, e) -> int:
    key = (seed % _TWO64).to_bytes(8, "little")
    coords = e[0] + e[1]
    h = hashlib.blake2b(struct.pack(f"<{len(coords)}q", *coords), digest_size=8, key=key)
    return int.from_bytes(h.digest(), "little")


def draw_num(spec: DistributionSpec, seed: int, e) -> int:
    """Numerator (over ``spec.den``) of the weight of edge ``e`` under ``seed``."""
    return spec.num_from_u64(_edge_u64(seed, e))


def draw_weight(spec: DistributionSpec, seed: int, e) -> Fraction:
    return Fraction(draw_num(spec, seed, e), spec.den)


def box_vertices(lo, hi):
    return product(*(range(a, b + 1) for a, b in zip(lo, hi)))


def box_edges(lo, hi):
    """Every edge with at least one endpoint in the box, in sorted order."""
    d = len(lo)
    found = set()
    for v in box_vertices(lo, hi):
        for k in range(d):
            for s in (-1, 1):
                u = v[:k] + (v[k] + s,) + v[k + 1:]
                found.add((v, u) if v < u else (u, v))
    return sorted(found)


def in_box(v, lo, hi) -> bool:
    return all(a <= x <= b for x, a, b in zip(v, lo, hi))


class Environment:
    """Weights on every edge with at least one endpoint in ``[lo, hi]``.

    Treat instances as immutable; derive modified copies with
    :func:`apply_overrides`.
    """

    def __init__(self, d, lo, hi, den, nums, spec=None, seed=None, overrides=None):
        self.d = d
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        self.den = den
        self._num = nums
        self.spec = spec
        self.seed = seed
        self.overrides = MappingProxyType(dict(overrides or {}))
        self._adj = None

    @property
    def box(self):
        return self.lo, self.hi

    def contains(self, v) -> bool:
        return in_box(v, self.lo, self.hi)

    def vertices(self):
        return box_vertices(self.lo, self.hi)

    def edges(self):
        return iter(self._num)

    def has_edge(self, e) -> bool:
        return e in self._num

    def num(self, e):
        """Integer numerator over :attr:`den`, or ``None`` for BLOCKED."""
        try:
            return self._num[e]
        except KeyError:
            raise EdgeOutOfBox(f"edge {e} has no endpoint in box {self.lo}..{self.hi}") from None

    def weight(self, e):
        n = self.num(e)
        return BLOCKED if n is None else Fraction(n, self.den)

    def weights(self) -> dict:
        return {e: (BLOCKED if n is None else Fraction(n, self.den)) for e, n in self._num.items()}

    def floor_num(self) -> int:
        """Smallest finite in-box numerator: a per-edge lower bound for in-box paths."""
        return min(n for n in self._num.values() if n is not None)

    def all_positive(self) -> bool:
        return all(n is None or n > 0 for n in self._num.values())

    def adjacency(self):
        """``{v: [(u, edge, num), ...]}`` over in-box vertices, BLOCKED edges omitted."""
        if self._adj is None:
            adj = {}
            d = self.d
            lo, hi = self.lo, self.hi
            for v in self.vertices():
                out = []
                for k in range(d):
                    for s in (-1, 1):
                        x = v[k] + s
                        if not lo[k] <= x <= hi[k]:
                            continue
                        u = v[:k] + (x,) + v[k + 1:]
                        e = (v, u) if v < u else (u, v)
                        n = self._num[e]
                        if n is not None:
                            out.append((u, e, n))
                adj[v] = out
            self._adj = adj
        return self._adj

    def __eq__(self, other):
        if not isinstance(other, Environment):
            return NotImplemented
        return (self.d, self.lo, self.hi) == (other.d, other.lo, other.hi) and self.weights() == other.weights()

    def __repr__(self):
        return f"Environment(d={self.d}, box={self.lo}..{self.hi}, seed={self.seed}, edges={len(self._num)})"


def sample_environment(spec: DistributionSpec, box, seed: int) -> Environment:
    """Draw i.i.d. weights for every edge meeting ``box = (lo, hi)``."""
    lo, hi = (tuple(int(x) for x in c) for c in box)
    if len(lo) != spec.d or len(hi) != spec.d:
        raise ValidationError(f"box dimension does not match d={spec.d}")
    if any(a > b for a, b in zip(lo, hi)):
        raise ValidationError("box is empty")
    nums = {e: draw_num(spec, seed, e) for e in box_edges(lo, hi)}
    return Environment(spec.d, lo, hi, spec.den, nums, spec=spec, seed=seed)


def apply_overrides(env: Environment, pairs) -> Environment:
    """Return a copy of ``env`` in which the listed edges take the listed weights."""
    pairs = [(e, as_weight(w)) for e, w in pairs]
    if not pairs:
        return env
    for e, _ in pairs:
        if not env.has_edge(e):
            raise EdgeOutOfBox(f"edge {e} has no endpoint in box {env.lo}..{env.hi}")
    den = math.lcm(env.den, *(w.denominator for _, w in pairs if w is not BLOCKED))
    scale = den // env.den
    nums = {e: (None if n is None else n * scale) for e, n in env._num.items()}
    overrides = dict(env.overrides)
    for e, w in pairs:
        nums[e] = None if w is BLOCKED else int(w * den)
        overrides[e] = w
    return Environment(env.d, env.lo, env.hi, den, nums, spec=env.spec, seed=env.seed, overrides=overrides)


def _fmt_vertex(v) -> str:
    return ",".join(str(x) for x in v)


def _parse_vertex(s: str):
    return tuple(int(x) for x in s.split(","))


def dump_environment(env: Environment) -> str:
    """Text dump: header ``d lo..hi seed``, then one ``v1 v2 num/den`` line per edge."""
    lines = [f"{env.d} {_fmt_vertex(env.lo)}..{_fmt_vertex(env.hi)} {env.seed if env.seed is not None else '-'}"]
    for e in sorted(env.edges()):
        lines.append(f"{_fmt_vertex(e[0])} {_fmt_vertex(e[1])} {format_weight(env.weight(e))}")
    return "\n".join(lines) + "\n"


def load_environment(text: str, spec: DistributionSpec | None = None) -> Environment:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ParseError("empty environment dump")
    try:
        d = int(rows[0][0])
        lo_s, hi_s = rows[0][1].split("..")
        lo, hi = _parse_vertex(lo_s), _parse_vertex(hi_s)
        seed = None if rows[0][2] == "-" else int(rows[0][2])
    except (IndexError, ValueError) as exc:
        raise ParseError(f"line 1: bad header {' '.join(rows[0])!r}") from exc
    weights = {}
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            weights[edge(_parse_vertex(row[0]), _parse_vertex(row[1]))] = as_weight(row[2])
        except (IndexError, ValueError) as exc:
            raise ParseError(f"line {lineno}: {' '.join(row)!r}") from exc
    expected = set(box_edges(lo, hi))
    if set(weights) != expected:
        raise ParseError("edge list does not cover exactly the edges meeting the box")
    den = math.lcm(1, *(w.denominator for w in weights.values() if w is not BLOCKED))
    nums = {e: (None if weights[e] is BLOCKED else int(weights[e] * den)) for e in sorted(expected)}
    return Environment(d, lo, hi, den, nums, spec=spec, seed=seed)


def environment_from_weights(d, lo, hi, weights, default=None, spec=None) -> Environment:
    """Build an environment from an explicit ``{edge: weight}`` table (tests, CLI input)."""
    weights = {edge(*e): as_weight(w) for e, w in weights.items()}
    all_edges = box_edges(tuple(lo), tuple(hi))
    table = {}
    for e in all_edges:
        if e in weights:
            table[e] = weights[e]
        elif default is not None:
            table[e] = as_weight(default)
        else:
            raise ValidationError(f"no weight for edge {e}")
    den = math.lcm(1, *(w.denominator for w in table.values() if w is not BLOCKED))
    nums = {e: (None if w is BLOCKED else int(w * den)) for e, w in table.items()}
    return Environment(d, tuple(lo), tuple(hi), den, nums, spec=spec)
