"""Geometry of the n-cube system: S-cubes, T-cubes and the slab-shaped n-boxes.

All regions are axis-aligned with inclusive integer vertex ranges ``lo..hi``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .env import box_vertices, in_box

S_CUBE = "S"
T_CUBE = "T"
J_BOX = "J"


@dataclass(frozen=True)
class NBox:
    """One member of the cube system at scale ``n``.

    ``kind`` is ``"S"``, ``"T"`` or ``"J"``.  For ``"J"`` boxes ``j`` is a signed
    1-based axis label: the box is ``T(l) ∩ T(l + 2 sgn(j) e_|j|)``, of side
    ``n`` along axis ``|j|`` and ``3n`` along every other axis.
    """

    l: tuple
    n: int
    kind: str = J_BOX
    j: int = 0

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))
        if self.n < 1:
            raise ValueError("scale n must be positive")
        if self.kind == J_BOX:
            if not 1 <= abs(self.j) <= len(self.l):
                raise ValueError(f"axis label j={self.j} outside ±1..±{len(self.l)}")
        elif self.kind in (S_CUBE, T_CUBE):
            if self.j:
                raise ValueError("S and T cubes carry no axis label")
        else:
            raise ValueError(f"unknown box kind {self.kind!r}")

    @classmethod
    def s_cube(cls, l, n):
        return cls(tuple(l), n, S_CUBE)

    @classmethod
    def t_cube(cls, l, n):
        return cls(tuple(l), n, T_CUBE)

    @classmethod
    def j_box(cls, l, n, j):
        return cls(tuple(l), n, J_BOX, j)

    @property
    def d(self) -> int:
        return len(self.l)

    @property
    def axis(self) -> int:
        """0-based short axis of a J box."""
        return abs(self.j) - 1

    @property
    def bounds(self):
        n = self.n
        if self.kind == S_CUBE:
            return tuple(n * x for x in self.l), tuple(n * (x + 1) - 1 for x in self.l)
        lo = [n * x - n for x in self.l]
        hi = [n * x + 2 * n for x in self.l]
        if self.kind == J_BOX:
            k = self.axis
            if self.j > 0:
                lo[k] = n * self.l[k] + n
            else:
                hi[k] = n * self.l[k]
        return tuple(lo), tuple(hi)

    @property
    def lo(self):
        return self.bounds[0]

    @property
    def hi(self):
        return self.bounds[1]

    def side_lengths(self):
        lo, hi = self.bounds
        return tuple(b - a for a, b in zip(lo, hi))

    def contains(self, v) -> bool:
        lo, hi = self.bounds
        return in_box(v, lo, hi)

    def vertices(self):
        return box_vertices(*self.bounds)

    def meets(self, e) -> bool:
        """``e ∩ B ≠ ∅`` for an edge regarded as its pair of endpoints."""
        return self.contains(e[0]) or self.contains(e[1])

    def edges_meeting(self):
        lo, hi = self.bounds
        found = set()
        for v in box_vertices(lo, hi):
            for k in range(self.d):
                for s in (-1, 1):
                    u = v[:k] + (v[k] + s,) + v[k + 1:]
                    found.add((v, u) if v < u else (u, v))
        return sorted(found)

    def outer_boundary(self):
        """∂⁺B: vertices outside B with a lattice neighbour inside."""
        lo, hi = self.bounds
        out = []
        for k in range(self.d):
            for side in (lo[k] - 1, hi[k] + 1):
                ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
                ranges[k] = range(side, side + 1)
                out.extend(box_vertices([r.start for r in ranges], [r.stop - 1 for r in ranges]))
        return sorted(set(out))

    def in_outer_boundary(self, v) -> bool:
        lo, hi = self.bounds
        out = 0
        for x, a, b in zip(v, lo, hi):
            if x == a - 1 or x == b + 1:
                out += 1
            elif not a <= x <= b:
                return False
        return out == 1

    def exit_axis(self, v):
        """Axis along which a boundary vertex ``v`` lies outside the box, and the inward sign."""
        lo, hi = self.bounds
        for k, (x, a, b) in enumerate(zip(v, lo, hi)):
            if x == a - 1:
                return k, 1
            if x == b + 1:
                return k, -1
        raise ValueError(f"{v} is not on the outer boundary")

    def depth(self, v) -> int:
        """``d_inf(v, B^c)`` over lattice points: 0 outside, at least 1 inside."""
        lo, hi = self.bounds
        best = None
        for x, a, b in zip(v, lo, hi):
            if not a <= x <= b:
                return 0
            m = min(x - a + 1, b - x + 1)
            best = m if best is None else min(best, m)
        return best

    def large_faces(self):
        """The two faces of a J box perpendicular to its short axis, as ``(axis, lo_coord, hi_coord)``."""
        lo, hi = self.bounds
        k = self.axis
        return k, lo[k], hi[k]


def j_boxes_meeting(lo, hi, n: int, d: int):
    """Every distinct J box at scale ``n`` that intersects the region ``lo..hi``.

    ``B^{+j}(l)`` and ``B^{-j}(l + 2e_j)`` are the same vertex set; only the
    first label met is kept.
    """
    out = []
    seen = set()
    ranges = []
    for a, b in zip(lo, hi):
        # a T-range [n l - n, n l + 2n] meets [a, b] iff l in [ceil((a-2n)/n), floor((b+n)/n)]
        ranges.append(range(-((2 * n - a) // n), (b + n) // n + 1))
    for l in box_vertices([r.start for r in ranges], [r.stop - 1 for r in ranges]):
        for axis in range(1, d + 1):
            for j in (axis, -axis):
                B = NBox(l, n, J_BOX, j)
                blo, bhi = B.bounds
                if (blo, bhi) in seen:
                    continue
                if all(x <= y2 and x2 <= y for x, y, x2, y2 in zip(blo, bhi, lo, hi)):
                    seen.add((blo, bhi))
                    out.append(B)
    return out
