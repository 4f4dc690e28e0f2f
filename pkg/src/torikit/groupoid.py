"""The parameter-indexed arrow space over a polytope.

An arrow is a triple (hbar, y, k): base point y in the polytope, integer
mode k, deformation parameter hbar.  It is valid when y lies in the stratum
admitting k and the translated point y + hbar*k keeps every facet paired
with k strictly slack; equivalently (for smooth polytopes) when y and
y + hbar*k share their isotropy.  At hbar = 0 arrows are loops, so the zero
fiber is a bundle of abelian groups.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import intlat
from .errors import ComposabilityError, DomainError, OrbitCapError
from .polytope import DelzantPolytope, in_delta_k, in_u_k, isotropy_lattice, ratpoint, vertices

__all__ = [
    "GroupoidPoint", "Orbit", "arrow",
    "is_member", "is_member_isotropy",
    "source", "range_", "compose", "invert", "orbit",
]


@dataclass(frozen=True)
class GroupoidPoint:
    """One arrow (hbar, y, k)."""

    hbar: Fraction
    y: tuple[Fraction, ...]
    k: tuple[int, ...]


def arrow(hbar, y, k) -> GroupoidPoint:
    """Coercing constructor: rationals for hbar/y, ints for k."""
    return GroupoidPoint(Fraction(hbar), ratpoint(y), tuple(int(c) for c in k))


def _translate(y, hbar, k):
    return tuple(c + hbar * ki for c, ki in zip(y, k))


def is_member(P: DelzantPolytope, g: GroupoidPoint) -> bool:
    """Facet-based membership: y admits k and y + hbar*k stays strictly
    slack on every facet paired with k."""
    return (in_delta_k(P, g.y, g.k)
            and in_u_k(P, _translate(g.y, g.hbar, g.k), g.k))


def is_member_isotropy(P: DelzantPolytope, g: GroupoidPoint) -> bool:
    """Isotropy-based membership: both endpoints admit k and carry the same
    isotropy algebra.  Points outside the polytope give False, not an error.
    """
    end = _translate(g.y, g.hbar, g.k)
    if not (P.contains(g.y) and P.contains(end)):
        return False
    if not (in_delta_k(P, g.y, g.k) and in_delta_k(P, end, g.k)):
        return False
    return intlat.row_space_equal(isotropy_lattice(P, g.y),
                                  isotropy_lattice(P, end))


def _require_member(P, g):
    if not is_member(P, g):
        raise DomainError(f"arrow {g} is not in the groupoid")


def source(P: DelzantPolytope, g: GroupoidPoint):
    """Unit point (hbar, y) under the arrow's tail."""
    _require_member(P, g)
    return (g.hbar, g.y)


def range_(P: DelzantPolytope, g: GroupoidPoint):
    """Unit point (hbar, y + hbar*k) at the arrow's head."""
    _require_member(P, g)
    return (g.hbar, _translate(g.y, g.hbar, g.k))


def compose(P: DelzantPolytope, g1: GroupoidPoint, g2: GroupoidPoint) -> GroupoidPoint:
    """Compose g1 after g2 (range of g2 must equal source of g1)."""
    _require_member(P, g1)
    _require_member(P, g2)
    if g1.hbar != g2.hbar:
        raise ComposabilityError("arrows live over different hbar")
    if _translate(g2.y, g2.hbar, g2.k) != g1.y:
        raise ComposabilityError(
            f"range of {g2} does not match source of {g1}")
    out = GroupoidPoint(g1.hbar, g2.y,
                        tuple(a + b for a, b in zip(g1.k, g2.k)))
    _require_member(P, out)
    return out


def invert(P: DelzantPolytope, g: GroupoidPoint) -> GroupoidPoint:
    """Inverse arrow (hbar, y + hbar*k, -k)."""
    _require_member(P, g)
    return GroupoidPoint(g.hbar, _translate(g.y, g.hbar, g.k),
                         tuple(-c for c in g.k))


# ---------------------------------------------------------------------------
# orbits at fixed hbar != 0

@dataclass(frozen=True)
class Orbit:
    """A finite orbit of the hbar-fiber: ordered points plus an index map."""

    polytope: DelzantPolytope
    hbar: Fraction
    points: tuple[tuple[Fraction, ...], ...]
    index: dict[tuple[Fraction, ...], int] = field(repr=False)

    def __len__(self):
        return len(self.points)

    def target_index(self, i: int, k) -> int | None:
        """Index of points[i] + hbar*k when that arrow is valid, else None."""
        g = GroupoidPoint(self.hbar, self.points[i], tuple(int(c) for c in k))
        if not is_member(self.polytope, g):
            return None
        return self.index.get(_translate(self.points[i], self.hbar, g.k))

    def mode_between(self, i: int, j: int) -> tuple[int, ...] | None:
        """The unique k with points[j] = points[i] + hbar*k, if integral."""
        diff = [(b - a) / self.hbar for a, b in zip(self.points[i], self.points[j])]
        if any(d.denominator != 1 for d in diff):
            return None
        return tuple(int(d) for d in diff)

    @cached_property
    def adjacency(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Admissible modes between point pairs (valid arrows only)."""
        if len(self.points) ** 2 > 4_000_000:
            raise DomainError("adjacency table too large; query mode_between")
        table = {}
        for i in range(len(self.points)):
            for j in range(len(self.points)):
                k = self.mode_between(i, j)
                if k is not None and is_member(
                        self.polytope, GroupoidPoint(self.hbar, self.points[i], k)):
                    table[(i, j)] = k
        return table


def _bounding_box(P: DelzantPolytope):
    verts = vertices(P)
    if not verts:
        raise DomainError("polytope has no vertices")
    lo = [min(v[i] for v in verts) for i in range(P.n)]
    hi = [max(v[i] for v in verts) for i in range(P.n)]
    return lo, hi


class _OrbitLattice:
    """Candidate lattice y0 + hbar*Z^n inside the polytope, as scaled ints.

    One common denominator turns every facet test into integer comparisons;
    arrow validity between two lattice points u, w reduces to the per-facet
    test  slack(w) == slack(u)  or  (slack(u) > 0 and slack(w) > 0),
    vectorized over the whole candidate set with int64 (bound-checked).
    """

    def __init__(self, P, hbar, y0):
        self.P = P
        lo, hi = _bounding_box(P)
        denoms = [hbar.denominator]
        denoms += [c.denominator for c in y0]
        denoms += [lam.denominator for lam in P.offsets]
        scale = math.lcm(*denoms)
        self.scale = scale
        axes = []
        for i in range(P.n):
            a = (lo[i] - y0[i]) / hbar
            b = (hi[i] - y0[i]) / hbar
            if a > b:
                a, b = b, a
            axes.append(np.arange(math.ceil(a), math.floor(b) + 1, dtype=np.int64))
        if any(a.size == 0 for a in axes):
            raise OverflowError("empty candidate box")  # y0 in polytope, cannot happen
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.n)
        y0_int = np.array([int(c * scale) for c in y0], dtype=np.int64)
        h_int = int(hbar * scale)
        X = np.array([list(x) for x in P.normals], dtype=np.int64)
        lam_int = np.array([int(lam * scale) for lam in P.offsets], dtype=np.int64)
        largest = (np.abs(grid).max(initial=1) * abs(h_int) + np.abs(y0_int).max()) \
            * int(np.abs(X).sum(axis=1).max())
        if largest + np.abs(lam_int).max(initial=1) > 2 ** 60:
            raise OverflowError("coordinates too large for the int64 path")
        coords = y0_int[None, :] + h_int * grid
        slack = coords @ X.T - lam_int[None, :]
        inside = (slack >= 0).all(axis=1)
        self.coords = coords[inside]
        self.slack = slack[inside]
        self.keys = {tuple(int(c) for c in row): i
                     for i, row in enumerate(self.coords)}
        self.start = self.keys[tuple(int(c) for c in y0_int)]

    def neighbor_rows(self, row: int) -> np.ndarray:
        s = self.slack[row]
        ok = ((self.slack == s[None, :])
              | ((s[None, :] > 0) & (self.slack > 0))).all(axis=1)
        ok[row] = False
        return np.nonzero(ok)[0]

    def point(self, row: int):
        return tuple(Fraction(int(c), self.scale) for c in self.coords[row])


def _neighbors_fraction(P, hbar, y):
    """Pure-Fraction neighbor enumeration (fallback and test oracle)."""
    lo, hi = _bounding_box(P)
    ranges = []
    for i in range(P.n):
        a = (lo[i] - y[i]) / hbar
        b = (hi[i] - y[i]) / hbar
        if a > b:
            a, b = b, a
        ranges.append(range(math.ceil(a), math.floor(b) + 1))
    out = []
    import itertools
    for k in itertools.product(*ranges):
        if all(c == 0 for c in k):
            continue
        g = GroupoidPoint(hbar, y, k)
        if is_member(P, g):
            out.append((k, _translate(y, hbar, k)))
    return out


def orbit(P: DelzantPolytope, hbar, y0, cap: int = 1_000_000) -> Orbit:
    """Breadth-first closure of {y0} under all valid single arrows.

    Finite for compact polytopes; the cap guards degenerate input and turns
    runaway growth into a diagnostic error.
    """
    hbar = Fraction(hbar)
    if hbar == 0:
        raise DomainError("orbits are defined for hbar != 0")
    if not P.compact:
        raise DomainError("orbit enumeration requires a compact polytope")
    y0 = ratpoint(y0)
    if not P.contains(y0):
        raise DomainError(f"base point {y0} lies outside the polytope")

    try:
        lattice = _OrbitLattice(P, hbar, y0)
    except OverflowError:
        return _orbit_fraction(P, hbar, y0, cap)

    order = [lattice.start]
    seen = np.zeros(len(lattice.coords), dtype=bool)
    seen[lattice.start] = True
    head = 0
    while head < len(order):
        current = order[head]
        head += 1
        for row in lattice.neighbor_rows(current):
            if not seen[row]:
                if len(order) >= cap:
                    raise OrbitCapError(
                        f"orbit exceeded cap of {cap} points "
                        "(noncompact or degenerate input?)")
                seen[row] = True
                order.append(int(row))
    points = tuple(lattice.point(r) for r in order)
    index = {p: i for i, p in enumerate(points)}
    return Orbit(P, hbar, points, index)


def _orbit_fraction(P, hbar, y0, cap):
    # all-Fraction fallback; also serves as the independent slow oracle
    index = {y0: 0}
    points = [y0]
    queue = [y0]
    while queue:
        current = queue.pop(0)
        for _, endpoint in _neighbors_fraction(P, hbar, current):
            if endpoint not in index:
                if len(points) >= cap:
                    raise OrbitCapError(
                        f"orbit exceeded cap of {cap} points "
                        "(noncompact or degenerate input?)")
                index[endpoint] = len(points)
                points.append(endpoint)
                queue.append(endpoint)
    return Orbit(P, hbar, tuple(points), index)
