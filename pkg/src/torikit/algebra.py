"""Convolution *-algebra of finitely supported modes over the arrow space.

An element assigns to finitely many modes k a complex coefficient given as a
pair of smooth real expressions in (h, y1..yn).  Products convolve modes with
the base point of the second factor shifted by h times the first factor's
mode; every term is masked by membership of both factor arrows.  Renormalized
commutators (f*g - g*f)/(i*hbar) converge, as hbar -> 0, to a classical
bracket that is also computed symbolically from the zero fiber.

Mode conventions (pinned once, shared by every module):

    (f.g)(h, y, k)   = sum_{l+m=k} f(h, y, l) * g(h, y + h*l, m)
    (f*)(h, y, k)    = conj(f(h, y + h*k, -k))
    bracket(f,g)(y,k) = (1/i) sum_{l+m=k} sum_i [ l_i f_l(0,y) d_i g_m(0,y)
                                                - m_i g_m(0,y) d_i f_l(0,y) ]

With these, the canonical pair y*e_1, y*e_(-1) on the unit interval has
renormalized commutator identically -2iy at mode 0, for every hbar.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .errors import DomainError, FormatError, MarginError
from .groupoid import GroupoidPoint, is_member
from .polytope import DelzantPolytope, ratpoint

__all__ = [
    "AlgebraElement", "element", "observable_from_dict", "observable_to_dict",
    "load_observable", "extension_value", "groupoid_value", "convolve",
    "commutator", "renormalized_commutator", "involution",
    "bracket_element", "symbolic_bracket", "pointwise_product_at_zero",
    "BracketLimit", "numeric_bracket_limit", "displacements", "check_margin",
]


@dataclass(frozen=True)
class AlgebraElement:
    """Finite mode map k -> complex coefficient expression in (h, y)."""

    n: int
    modes: tuple[tuple[tuple[int, ...], ex.ComplexExpr], ...]

    def mode_dict(self) -> dict[tuple[int, ...], ex.ComplexExpr]:
        return dict(self.modes)

    def mode_keys(self):
        return [k for k, _ in self.modes]

    def coefficient(self, k) -> ex.ComplexExpr:
        k = tuple(int(c) for c in k)
        for key, c in self.modes:
            if key == k:
                return c
        return ex.ComplexExpr.zero()

    def __add__(self, other):
        return _combine(self, other, lambda a, b: a + b)

    def __sub__(self, other):
        return _combine(self, other, lambda a, b: a - b)

    def scaled(self, a, b=0) -> "AlgebraElement":
        """Multiply by the exact complex scalar a + b*i."""
        return AlgebraElement(
            self.n, tuple((k, c.scaled(a, b)) for k, c in self.modes))

    def subs_h_zero(self) -> "AlgebraElement":
        return AlgebraElement(
            self.n, tuple((k, c.subs_h(0)) for k, c in self.modes))

    def max_mode(self) -> int:
        return max((max(abs(c) for c in k) for k, _ in self.modes), default=0)


def _combine(f, g, op):
    if f.n != g.n:
        raise DomainError("elements live over different dimensions")
    out = {k: c for k, c in f.modes}
    for k, c in g.modes:
        out[k] = op(out[k], c) if k in out else op(ex.ComplexExpr.zero(), c)
    return AlgebraElement(f.n, tuple(sorted(out.items())))


def _coerce_coefficient(value, n) -> ex.ComplexExpr:
    if isinstance(value, ex.ComplexExpr):
        return value
    if isinstance(value, ex.Expr):
        return ex.ComplexExpr.from_real(value)
    if isinstance(value, str):
        return ex.ComplexExpr.from_real(ex.parse(value, n))
    if isinstance(value, (int, Fraction)):
        return ex.ComplexExpr.from_real(ex.const(value))
    if isinstance(value, (tuple, list)) and len(value) == 2:
        re_part, im_part = value
        re_part = re_part if isinstance(re_part, ex.Expr) else (
            ex.parse(re_part, n) if isinstance(re_part, str) else ex.const(re_part))
        im_part = im_part if isinstance(im_part, ex.Expr) else (
            ex.parse(im_part, n) if isinstance(im_part, str) else ex.const(im_part))
        return ex.ComplexExpr(re_part, im_part)
    raise FormatError(f"cannot interpret coefficient {value!r}")


def element(n: int, modes) -> AlgebraElement:
    """Build an element from {k: coefficient}.

    Coefficients may be expression strings, Expr trees, (re, im) pairs,
    numbers, or ComplexExpr.  Mode keys are integer tuples (ints allowed when
    n = 1).
    """
    packed = []
    for k, value in modes.items():
        if isinstance(k, int):
            k = (k,)
        k = tuple(int(c) for c in k)
        if len(k) != n:
            raise FormatError(f"mode {k} has length {len(k)}, expected {n}")
        packed.append((k, _coerce_coefficient(value, n)))
    return AlgebraElement(n, tuple(sorted(packed)))


# ---------------------------------------------------------------------------
# JSON schema: {"modes": [{"k": [int, ...], "re": "expr", "im": "expr"}]}

def observable_from_dict(doc, n: int) -> AlgebraElement:
    try:
        modes = {}
        for item in doc["modes"]:
            k = tuple(int(c) for c in item["k"])
            modes[k] = (item.get("re", "0"), item.get("im", "0"))
        return element(n, modes)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad observable document: {exc}") from exc


def observable_to_dict(f: AlgebraElement) -> dict:
    return {"modes": [
        {"k": list(k), "re": ex.to_text(c.re), "im": ex.to_text(c.im)}
        for k, c in f.modes
    ]}


def load_observable(path, n: int) -> AlgebraElement:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read observable file {path}: {exc}") from exc
    return observable_from_dict(doc, n)


# ---------------------------------------------------------------------------
# evaluation on the arrow space

def extension_value(f: AlgebraElement, hbar, y, k) -> complex:
    """Value of the smooth extension at (hbar, y, k), ignoring membership."""
    return f.coefficient(k).evaluate(hbar, y)


def groupoid_value(P: DelzantPolytope, f: AlgebraElement, hbar, y, k) -> complex:
    """Extension value masked by arrow membership (0 off the arrow space)."""
    g = GroupoidPoint(Fraction(hbar), ratpoint(y), tuple(int(c) for c in k))
    if not is_member(P, g):
        return 0j
    return extension_value(f, g.hbar, g.y, g.k)


def _shift(y, hbar, l):
    return tuple(c + hbar * li for c, li in zip(y, l))


def convolve(P: DelzantPolytope, f: AlgebraElement, g: AlgebraElement,
             hbar, y, k) -> complex:
    """(f.g)(hbar, y, k): mode sum over l+m=k with the second factor shifted.

    Each term carries the indicator that both factor arrows lie in the arrow
    space, so the sum never sees points where a coefficient is singular but
    masked.
    """
    if f.n != g.n:
        raise DomainError("elements live over different dimensions")
    hbar = Fraction(hbar)
    y = ratpoint(y)
    k = tuple(int(c) for c in k)
    total = 0j
    for l, cf in f.modes:
        m = tuple(a - b for a, b in zip(k, l))
        cg = g.coefficient(m)
        if cg.is_zero_tree():
            continue
        if not is_member(P, GroupoidPoint(hbar, y, l)):
            continue
        mid = _shift(y, hbar, l)
        if not is_member(P, GroupoidPoint(hbar, mid, m)):
            continue
        total += cf.evaluate(hbar, y) * cg.evaluate(hbar, mid)
    return total


def commutator(P, f, g, hbar, y, k) -> complex:
    return convolve(P, f, g, hbar, y, k) - convolve(P, g, f, hbar, y, k)


def renormalized_commutator(P, f, g, hbar, y, k) -> complex:
    """(f.g - g.f)/(i*hbar) at (hbar, y, k); hbar must be nonzero."""
    hbar = Fraction(hbar)
    if hbar == 0:
        raise DomainError(
            "renormalized commutator needs hbar != 0; use symbolic_bracket "
            "for the limit value")
    return commutator(P, f, g, hbar, y, k) / (1j * float(hbar))


def involution(f: AlgebraElement) -> AlgebraElement:
    """Adjoint: (f*)(h, y, k) = conj(f(h, y + h*k, -k)).

    For each original mode l the coefficient moves to mode -l with y
    substituted by y - h*l, symbolically, then conjugated.
    """
    out = []
    for l, c in f.modes:
        neg = tuple(-a for a in l)
        out.append((neg, c.shift_y(neg).conjugate()))
    return AlgebraElement(f.n, tuple(sorted(out)))


# ---------------------------------------------------------------------------
# the classical bracket from the zero fiber, symbolically

def bracket_element(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """The limit bracket as an element over the zero fiber.

    Mode k coefficient: (1/i) sum_{l+m=k} sum_i [ l_i f_l d_i g_m
    - m_i g_m d_i f_l ], all coefficients taken at h = 0.
    """
    if f.n != g.n:
        raise DomainError("elements live over different dimensions")
    n = f.n
    acc: dict[tuple[int, ...], ex.ComplexExpr] = {}
    for l, cf in f.modes:
        cf0 = cf.subs_h(0)
        for m, cg in g.modes:
            cg0 = cg.subs_h(0)
            k = tuple(a + b for a, b in zip(l, m))
            term = ex.ComplexExpr.zero()
            for i in range(1, n + 1):
                li, mi = l[i - 1], m[i - 1]
                if li:
                    term = term + (cf0 * cg0.d_dy(i)).scaled(li)
                if mi:
                    term = term - (cg0 * cf0.d_dy(i)).scaled(mi)
            if term.is_zero_tree():
                continue
            acc[k] = acc[k] + term if k in acc else term
    out = {k: c.scaled(0, -1) for k, c in acc.items()}   # divide by i
    return AlgebraElement(n, tuple(sorted(out.items())))


def symbolic_bracket(f: AlgebraElement, g: AlgebraElement, y, k) -> complex:
    """Bracket value at (y, k) from symbolic derivatives at h = 0."""
    return extension_value(bracket_element(f, g), 0, y, k)


def pointwise_product_at_zero(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Mode convolution of the zero-fiber restrictions (no base shift)."""
    if f.n != g.n:
        raise DomainError("elements live over different dimensions")
    acc: dict[tuple[int, ...], ex.ComplexExpr] = {}
    for l, cf in f.modes:
        cf0 = cf.subs_h(0)
        for m, cg in g.modes:
            k = tuple(a + b for a, b in zip(l, m))
            term = cf0 * cg.subs_h(0)
            acc[k] = acc[k] + term if k in acc else term
    return AlgebraElement(f.n, tuple(sorted(acc.items())))


# ---------------------------------------------------------------------------
# numeric limit with margin guard and two-level extrapolation

def displacements(f: AlgebraElement, g: AlgebraElement):
    """Mode displacements visited by the two convolution orders."""
    out = set()
    for l, _ in f.modes:
        out.add(l)
        for m, _ in g.modes:
            out.add(m)
            out.add(tuple(a + b for a, b in zip(l, m)))
    out.discard(tuple([0] * f.n))
    return sorted(out)


def check_margin(P: DelzantPolytope, f, g, y, hbar_max) -> None:
    """Require every intermediate point y + hbar*l strictly interior.

    Raises MarginError naming the first offending intermediate point.
    """
    y = ratpoint(y)
    hbar_max = Fraction(hbar_max)
    if not P.is_interior(y):
        raise MarginError(f"sample point {_fmt_point(y)} is not interior")
    for d in displacements(f, g):
        p = _shift(y, hbar_max, d)
        if not P.is_interior(p):
            raise MarginError(
                f"intermediate point {_fmt_point(p)} (displacement {d} at "
                f"hbar = {hbar_max}) leaves the interior")


def _fmt_point(y):
    return "(" + ", ".join(str(c) for c in y) + ")"


@dataclass
class BracketLimit:
    """Extrapolated limit of the renormalized commutator over an hbar sweep."""

    estimate: complex
    order: float | str
    table: list[dict]

    def orders(self):
        return [row["order"] for row in self.table if row["order"] is not None]


def _two_level(h0, r0, h1, r1):
    # eliminate the leading O(hbar) term between consecutive nodes
    return (h0 * r1 - h1 * r0) / (h0 - h1)


def neville_to_zero(hbar_list, values) -> complex:
    """Iterated first-order elimination (full Richardson table) at zero."""
    hs = [float(h) for h in hbar_list]
    table = list(map(complex, values))
    for level in range(1, len(table)):
        table = [_two_level(hs[i], table[i], hs[i + level], table[i + 1])
                 for i in range(len(table) - 1)]
    return table[0]


def numeric_bracket_limit(P: DelzantPolytope, f: AlgebraElement,
                          g: AlgebraElement, y, k, hbar_list,
                          exact_threshold: float = 1e-12) -> BracketLimit:
    """Sweep the renormalized commutator over decreasing hbar and
    extrapolate to zero.

    The first-order elimination step is iterated over the whole sweep (a
    Richardson table); the table column reports the single-step extrapolant
    per level.  The empirical convergence order is the log-ratio of
    successive differences; "exact" is reported when every difference is
    below the threshold (the value does not depend on hbar).
    """
    hs = [Fraction(h) for h in hbar_list]
    if not hs or any(h <= 0 for h in hs):
        raise DomainError("hbar list must be positive (nonzero) values")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise DomainError("hbar list must be strictly decreasing")
    check_margin(P, f, g, y, hs[0])

    values = [renormalized_commutator(P, f, g, h, y, k) for h in hs]
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]

    table = []
    extrapolated = values[0]
    for i, (h, r) in enumerate(zip(hs, values)):
        order = None
        if 1 <= i <= len(diffs) - 1:
            num, den = diffs[i - 1], diffs[i]
            ratio_h = float(hs[i - 1] / hs[i])
            if den > exact_threshold and num > exact_threshold:
                order = math.log(num / den) / math.log(ratio_h)
        if i >= 1:
            extrapolated = _two_level(float(hs[i - 1]), values[i - 1],
                                      float(hs[i]), values[i])
        table.append({
            "hbar": h,
            "value": r,
            "diff": diffs[i - 1] if i >= 1 else None,
            "extrapolated": extrapolated,
            "order": order,
        })

    if all(d <= exact_threshold for d in diffs):
        return BracketLimit(values[-1], "exact", table)
    orders = [row["order"] for row in table if row["order"] is not None]
    order = sorted(orders)[len(orders) // 2] if orders else float("nan")
    return BracketLimit(neville_to_zero(hs, values), order, table)
