"""Rational polytopes from facet data: membership, faces, isotropy.

A polytope is given by primitive integer facet normals X_j and rational
offsets lambda_j as {y | <y, X_j> >= lambda_j for all j}.  All predicates
here are exact: facet activity <y, X_j> = lambda_j is decided in rational
arithmetic, never in floats.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import intlat
from .errors import DimensionError, DomainError, FormatError

__all__ = [
    "DelzantPolytope", "Face", "DelzantReport",
    "ratpoint", "in_delta_k", "in_u_k", "isotropy_lattice",
    "check_delzant", "require_delzant", "enumerate_faces", "vertices",
    "interval", "projective_space", "orthant", "product", "square",
    "load_polytope", "polytope_from_dict", "polytope_to_dict",
]


def _fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def ratpoint(coords) -> tuple[Fraction, ...]:
    """Coerce a sequence (ints, Fractions, 'p/q' strings) to an exact point."""
    return tuple(_fraction(c) for c in coords)


@dataclass(frozen=True)
class DelzantPolytope:
    """Facet description of a rational polytope.

    compact=False marks inputs accepted as unbounded (quarter-space style);
    boundedness checks are skipped for them and orbit-level features are
    refused downstream.
    """

    n: int
    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]
    compact: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("dimension must be >= 1")
        if len(self.normals) != len(self.offsets):
            raise DimensionError("one offset per facet normal required")
        for x in self.normals:
            if len(x) != self.n:
                raise DimensionError(
                    f"normal {x} has length {len(x)}, expected {self.n}")

    @property
    def n_facets(self) -> int:
        return len(self.normals)

    def pairing(self, y, j: int) -> Fraction:
        """<y, X_j> exactly."""
        return sum(Fraction(a) * b for a, b in zip(y, self.normals[j]))

    def slack(self, y, j: int) -> Fraction:
        return self.pairing(y, j) - self.offsets[j]

    def contains(self, y) -> bool:
        y = ratpoint(y)
        if len(y) != self.n:
            raise DimensionError(f"point has {len(y)} coordinates, expected {self.n}")
        return all(self.slack(y, j) >= 0 for j in range(self.n_facets))

    def active_set(self, y) -> tuple[int, ...]:
        """Indices of facets met with equality; requires y in the polytope."""
        y = ratpoint(y)
        if not self.contains(y):
            raise DomainError(f"point {y} lies outside the polytope")
        return tuple(j for j in range(self.n_facets) if self.slack(y, j) == 0)

    def min_slack(self, y) -> Fraction:
        y = ratpoint(y)
        return min(self.slack(y, j) for j in range(self.n_facets))

    def is_interior(self, y) -> bool:
        return self.min_slack(ratpoint(y)) > 0


@dataclass(frozen=True)
class Face:
    """An open face: its active facet set and a relative-interior sample."""

    active: tuple[int, ...]
    sample: tuple[Fraction, ...]
    dim: int


@dataclass
class DelzantReport:
    """Outcome of the smoothness/boundedness screening of a polytope."""

    ok: bool
    violations: list[str]
    vertices: list[tuple[Fraction, ...]]
    bounded: bool | None

    def summary(self) -> str:
        if self.ok:
            return (f"pass: {len(self.vertices)} vertices, "
                    f"bounded={self.bounded}")
        return "fail: " + "; ".join(self.violations)


# ---------------------------------------------------------------------------
# membership predicates

def in_delta_k(P: DelzantPolytope, y, k) -> bool:
    """y lies in the polytope and every facet active at y annihilates k."""
    y = ratpoint(y)
    k = tuple(int(c) for c in k)
    if len(y) != P.n or len(k) != P.n:
        raise DimensionError("point/mode dimension mismatch")
    for j in range(P.n_facets):
        s = P.slack(y, j)
        if s < 0:
            return False
        if s == 0 and _pair_int(k, P.normals[j]) != 0:
            return False
    return True


def in_u_k(P: DelzantPolytope, y, k) -> bool:
    """Every facet pairing nontrivially with k is strictly slack at y."""
    y = ratpoint(y)
    k = tuple(int(c) for c in k)
    if len(y) != P.n or len(k) != P.n:
        raise DimensionError("point/mode dimension mismatch")
    for j in range(P.n_facets):
        if _pair_int(k, P.normals[j]) != 0 and P.slack(y, j) <= 0:
            return False
    return True


def _pair_int(k, x) -> int:
    return sum(a * b for a, b in zip(k, x))


def isotropy_lattice(P: DelzantPolytope, y) -> list[tuple[int, ...]]:
    """Active facet normals at y (empty for interior points)."""
    active = P.active_set(y)
    return [P.normals[j] for j in active]


# ---------------------------------------------------------------------------
# vertices and screening

def vertices(P: DelzantPolytope) -> list[tuple[Fraction, ...]]:
    """All vertices, found by exact solves over n-subsets of facets."""
    found = {}
    for subset in itertools.combinations(range(P.n_facets), P.n):
        sol = intlat.solve_rational(
            [P.normals[j] for j in subset],
            [P.offsets[j] for j in subset])
        if sol is None:
            continue
        if P.contains(sol):
            found.setdefault(sol, subset)
    return sorted(found)


def _recession_ray(P: DelzantPolytope):
    """An integer direction of recession, or None when the polytope is bounded."""
    line = intlat.rational_kernel_vector(P.normals)
    if line is not None:
        return _primitive(line)
    if P.n == 1:
        candidates = [(Fraction(1),)]
    else:
        candidates = []
        for subset in itertools.combinations(range(P.n_facets), P.n - 1):
            v = intlat.rational_kernel_vector([P.normals[j] for j in subset])
            if v is not None:
                candidates.append(v)
    for v in candidates:
        for w in (v, tuple(-c for c in v)):
            if all(_pair_frac(w, x) >= 0 for x in P.normals):
                if any(c != 0 for c in w):
                    return _primitive(w)
    return None


def _pair_frac(v, x) -> Fraction:
    return sum(Fraction(a) * b for a, b in zip(v, x))


def _primitive(v):
    denoms = [Fraction(c).denominator for c in v]
    scale = math.lcm(*denoms) if denoms else 1
    ints = [int(Fraction(c) * scale) for c in v]
    g = math.gcd(*(abs(c) for c in ints))
    if g:
        ints = [c // g for c in ints]
    return tuple(ints)


def check_delzant(P: DelzantPolytope) -> DelzantReport:
    """Screen a polytope: primitive normals, simple unimodular vertices,
    boundedness and a nonempty interior (the latter two skipped when the
    polytope is flagged noncompact).  Violations are reported, not raised.
    """
    violations = []
    if P.n_facets == 0:
        return DelzantReport(False, ["no facets"], [], None)

    for j, x in enumerate(P.normals):
        if all(c == 0 for c in x):
            violations.append(f"facet {j}: zero normal")
        elif math.gcd(*(abs(c) for c in x)) != 1:
            violations.append(f"facet {j}: normal {x} is not primitive")

    verts = vertices(P)
    bounded = None
    if P.compact:
        ray = _recession_ray(P)
        bounded = ray is None
        if ray is not None:
            violations.append(f"unbounded: recession direction {ray}")
        if not verts:
            violations.append("no vertices (empty or degenerate)")

    for v in verts:
        active = tuple(j for j in range(P.n_facets) if P.slack(v, j) == 0)
        if len(active) > P.n:
            violations.append(
                f"vertex {v}: {len(active)} facets active (not simple)")
            continue
        det = intlat.determinant([P.normals[j] for j in active])
        if abs(det) != 1:
            violations.append(
                f"vertex {v}: active normals have determinant {det}")

    if P.compact and verts and not violations:
        centroid = tuple(
            sum(v[i] for v in verts) / len(verts) for i in range(P.n))
        for j in range(P.n_facets):
            if P.slack(centroid, j) <= 0:
                violations.append(
                    f"facet {j} touches every vertex (empty interior "
                    "or redundant facet)")

    return DelzantReport(not violations, violations, verts, bounded)


def require_delzant(P: DelzantPolytope) -> DelzantReport:
    """Raise DomainError unless the screening passes; returns the report."""
    report = check_delzant(P)
    if not report.ok:
        raise DomainError("polytope fails screening: " + report.summary())
    return report


# ---------------------------------------------------------------------------
# faces

def enumerate_faces(P: DelzantPolytope) -> list[Face]:
    """All open faces with exact relative-interior sample points.

    Requires a polytope that passed check_delzant.  For compact polytopes the
    candidates are subsets of single-vertex active sets; samples are vertex
    averages, verified to reproduce the declared active set exactly.
    """
    if not P.compact:
        return _faces_noncompact(P)
    verts = vertices(P)
    if not verts:
        raise DomainError("cannot enumerate faces of an empty polytope")
    active_of = {v: set(P.active_set(v)) for v in verts}
    candidates = {frozenset()}
    for v in verts:
        act = sorted(active_of[v])
        for r in range(1, len(act) + 1):
            candidates.update(frozenset(s) for s in itertools.combinations(act, r))
    faces = []
    for cand in sorted(candidates, key=lambda s: (len(s), sorted(s))):
        members = [v for v in verts if cand <= active_of[v]]
        if not members:
            continue
        sample = tuple(
            sum(v[i] for v in members) / len(members) for i in range(P.n))
        if set(P.active_set(sample)) != cand:
            continue
        rank = len(intlat._rref([P.normals[j] for j in sorted(cand)])[1]) if cand else 0
        faces.append(Face(tuple(sorted(cand)), sample, P.n - rank))
    return faces


def _faces_noncompact(P: DelzantPolytope) -> list[Face]:
    # Supported when facet normals are linearly independent (orthant-like):
    # solve for a point at exact distance 0/1 from active/inactive facets.
    if P.n_facets != P.n:
        raise DomainError(
            "face enumeration for noncompact polytopes needs exactly n "
            "independent facets")
    faces = []
    for r in range(P.n + 1):
        for subset in itertools.combinations(range(P.n_facets), r):
            rhs = [P.offsets[j] + (0 if j in subset else 1)
                   for j in range(P.n_facets)]
            sol = intlat.solve_rational(P.normals, rhs)
            if sol is None:
                raise DomainError("facets are not linearly independent")
            faces.append(Face(tuple(subset), sol, P.n - r))
    return faces


# ---------------------------------------------------------------------------
# builders

def interval() -> DelzantPolytope:
    """The unit interval [0, 1]; its phase space is the round 2-sphere."""
    return DelzantPolytope(1, ((1,), (-1,)), (Fraction(0), Fraction(-1)))


def projective_space(n: int) -> DelzantPolytope:
    """Standard simplex {y_i >= 0, sum y_i <= 1} in dimension n."""
    if n < 1:
        raise DimensionError("dimension must be >= 1")
    normals = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    normals.append(tuple([-1] * n))
    offsets = [Fraction(0)] * n + [Fraction(-1)]
    return DelzantPolytope(n, tuple(normals), tuple(offsets))


def orthant(n: int) -> DelzantPolytope:
    """Nonnegative orthant (noncompact; orbit features disabled)."""
    if n < 1:
        raise DimensionError("dimension must be >= 1")
    normals = tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n))
    return DelzantPolytope(n, normals, tuple([Fraction(0)] * n), compact=False)


def product(P1: DelzantPolytope, P2: DelzantPolytope) -> DelzantPolytope:
    """Cartesian product, facets embedded block-wise."""
    n = P1.n + P2.n
    normals = [x + (0,) * P2.n for x in P1.normals]
    normals += [(0,) * P1.n + x for x in P2.normals]
    offsets = P1.offsets + P2.offsets
    return DelzantPolytope(n, tuple(normals), tuple(offsets),
                           compact=P1.compact and P2.compact)


def square() -> DelzantPolytope:
    """The unit square [0, 1]^2."""
    return DelzantPolytope(
        2,
        ((1, 0), (0, 1), (-1, 0), (0, -1)),
        (Fraction(0), Fraction(0), Fraction(-1), Fraction(-1)))


# ---------------------------------------------------------------------------
# JSON schema:
#   {"n": int, "facets": [{"normal": [int, ...], "offset": "p/q"}],
#    "compact": bool}

def polytope_from_dict(doc) -> DelzantPolytope:
    try:
        n = int(doc["n"])
        facets = doc["facets"]
        compact = bool(doc.get("compact", True))
        normals = []
        offsets = []
        for f in facets:
            normal = tuple(int(c) for c in f["normal"])
            offset = f["offset"]
            if isinstance(offset, float):
                raise FormatError(
                    "offsets must be exact ('p/q' strings or ints), got float")
            normals.append(normal)
            offsets.append(_fraction(offset))
        return DelzantPolytope(n, tuple(normals), tuple(offsets), compact)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, DimensionError) as exc:
        raise FormatError(f"bad polytope document: {exc}") from exc


def polytope_to_dict(P: DelzantPolytope) -> dict:
    return {
        "n": P.n,
        "facets": [
            {"normal": list(x), "offset": str(lam)}
            for x, lam in zip(P.normals, P.offsets)
        ],
        "compact": P.compact,
    }


def load_polytope(path) -> DelzantPolytope:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read polytope file {path}: {exc}") from exc
    return polytope_from_dict(doc)
