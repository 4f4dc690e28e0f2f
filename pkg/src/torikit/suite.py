"""Seeded verification batteries over a polytope.

Each battery draws random observables, points and modes from a seeded
generator, checks one family of laws (groupoid axioms, algebra laws,
representation axioms, bracket identities, construction identities), and
reports counterexamples.  The CLI `verify suite` command and the acceptance
tests both run these.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import algebra as al
from . import classical as cl
from . import delzant as dz
from . import expr as ex
from . import groupoid as gr
from . import intlat
from . import matrixrep as mr
from .polytope import DelzantPolytope, ratpoint, vertices

__all__ = ["BatteryResult", "SuiteReport", "run_suite",
           "random_interior_point", "random_element", "random_arrow"]


@dataclass
class BatteryResult:
    name: str
    cases: int
    failures: list = field(default_factory=list)
    max_error: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, error: float, tol: float, context) -> None:
        self.cases += 1
        self.max_error = max(self.max_error, error)
        if not (error <= tol):
            self.failures.append({"error": error, **context})

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "cases": self.cases,
            "passed": self.passed,
            "max_error": self.max_error,
            "first_counterexample": _jsonable(self.failures[0]) if self.failures else None,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, al.AlgebraElement):
        return al.observable_to_dict(obj)
    return obj


@dataclass
class SuiteReport:
    polytope: dict
    seed: int
    tol: float
    batteries: list

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.batteries)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "tol": self.tol,
            "passed": self.passed,
            "batteries": [b.to_dict() for b in self.batteries],
        }


# ---------------------------------------------------------------------------
# seeded generators (all exact: dyadic rationals)

def random_interior_point(P: DelzantPolytope, rng: random.Random,
                          margin=Fraction(1, 8), denom: int = 64):
    """Rejection-sample a dyadic rational point with all slacks > margin."""
    verts = vertices(P)
    lo = [min(v[i] for v in verts) for i in range(P.n)]
    hi = [max(v[i] for v in verts) for i in range(P.n)]
    for _ in range(10_000):
        y = tuple(
            Fraction(rng.randint(int(lo[i] * denom), int(hi[i] * denom)), denom)
            for i in range(P.n))
        if P.min_slack(y) > margin:
            return y
    raise RuntimeError("could not sample an interior point (margin too big?)")


def random_point_near(P: DelzantPolytope, rng: random.Random, denom: int = 16):
    """Dyadic point in a slightly inflated bounding box (may be outside)."""
    verts = vertices(P)
    lo = [min(v[i] for v in verts) - 1 for i in range(P.n)]
    hi = [max(v[i] for v in verts) + 1 for i in range(P.n)]
    return tuple(
        Fraction(rng.randint(int(lo[i] * denom), int(hi[i] * denom)), denom)
        for i in range(P.n))


def _random_polynomial(n, rng, degree=2, *, allow_h=False):
    terms = []
    for _ in range(rng.randint(1, 3)):
        coeff = ex.const(Fraction(rng.randint(-8, 8), rng.randint(1, 4)))
        term = coeff
        for _ in range(rng.randint(0, degree)):
            var = ex.Y(rng.randint(1, n)) if (not allow_h or rng.random() < 0.8) \
                else ex.H()
            term = ex.Mul(term, var)
        terms.append(term)
    out = terms[0]
    for t in terms[1:]:
        out = ex.Add(out, t)
    return out


def _random_smooth(n, rng, *, allow_h=False):
    base = _random_polynomial(n, rng, allow_h=allow_h)
    roll = rng.random()
    if roll < 0.25:
        arg = ex.Add(ex.Y(rng.randint(1, n)), ex.const(Fraction(rng.randint(-2, 2))))
        return ex.Mul(base, ex.Fun(rng.choice(("sin", "cos")), arg))
    if roll < 0.35:
        arg = ex.Mul(ex.const(Fraction(1, 2)), ex.Y(rng.randint(1, n)))
        return ex.Add(base, ex.Fun("exp", arg))
    return base


def random_element(P: DelzantPolytope, rng: random.Random, max_mode: int = 1,
                   n_modes: int = 2, *, polynomial_only: bool = False,
                   allow_h: bool = False) -> al.AlgebraElement:
    """Random observable with globally smooth coefficients (no sqrt/div)."""
    n = P.n
    modes = {}
    for _ in range(n_modes):
        k = tuple(rng.randint(-max_mode, max_mode) for _ in range(n))
        re = (_random_polynomial(n, rng, allow_h=allow_h) if polynomial_only
              else _random_smooth(n, rng, allow_h=allow_h))
        im = (_random_polynomial(n, rng, degree=1, allow_h=allow_h)
              if rng.random() < 0.5 else ex.const(0))
        modes[k] = ex.ComplexExpr(re, im)
    return al.element(n, modes)


def random_arrow(P: DelzantPolytope, rng: random.Random,
                 max_mode: int = 1) -> gr.GroupoidPoint:
    """A random valid arrow with small hbar and interior-ish base point."""
    for _ in range(10_000):
        hbar = Fraction(rng.randint(1, 8), 32)
        y = random_interior_point(P, rng)
        k = tuple(rng.randint(-max_mode, max_mode) for _ in range(P.n))
        g = gr.arrow(hbar, y, k)
        if gr.is_member(P, g):
            return g
    raise RuntimeError("could not sample a valid arrow")


# ---------------------------------------------------------------------------
# batteries

def battery_associativity(P, rng, cases, tol) -> BatteryResult:
    """(f.g).h = f.(g.h) evaluated at random valid arrows."""
    result = BatteryResult("associativity", 0)
    for _ in range(cases):
        f = random_element(P, rng, allow_h=True)
        g = random_element(P, rng, allow_h=True)
        h = random_element(P, rng, allow_h=True)
        arrow = random_arrow(P, rng, max_mode=2)

        def value(a, b, c):
            # associate left then right via an explicit middle expansion
            total = 0j
            for l, _ in a.modes:
                m = tuple(x - y for x, y in zip(arrow.k, l))
                mid = tuple(c0 + arrow.hbar * li for c0, li in zip(arrow.y, l))
                if not gr.is_member(P, gr.GroupoidPoint(arrow.hbar, arrow.y, l)):
                    continue
                total += (al.extension_value(a, arrow.hbar, arrow.y, l)
                          * al.convolve(P, b, c, arrow.hbar, mid, m))
            return total

        # left association: (f.g).h
        left = 0j
        fg_modes = {tuple(x + y for x, y in zip(l, m))
                    for l, _ in f.modes for m, _ in g.modes}
        for lm in fg_modes:
            m = tuple(x - y for x, y in zip(arrow.k, lm))
            mid = tuple(c0 + arrow.hbar * li for c0, li in zip(arrow.y, lm))
            if not gr.is_member(P, gr.GroupoidPoint(arrow.hbar, arrow.y, lm)):
                continue
            if not gr.is_member(P, gr.GroupoidPoint(arrow.hbar, mid, m)):
                continue
            left += (al.convolve(P, f, g, arrow.hbar, arrow.y, lm)
                     * al.extension_value(h, arrow.hbar, mid, m))
        right = value(f, g, h)
        scale = max(abs(left), abs(right), 1.0)
        result.check(abs(left - right) / scale, tol, {
            "arrow": (arrow.hbar, arrow.y, arrow.k), "f": f, "g": g, "h": h})
    return result


def battery_involution(P, rng, cases, tol) -> BatteryResult:
    """f** = f and (f.g)* = g*.f* by randomized evaluation."""
    result = BatteryResult("involution", 0)
    for _ in range(cases):
        f = random_element(P, rng, allow_h=True)
        g = random_element(P, rng, allow_h=True)
        arrow = random_arrow(P, rng, max_mode=2)
        ff = al.involution(al.involution(f))
        e1 = al.groupoid_value(P, f, arrow.hbar, arrow.y, arrow.k)
        e2 = al.groupoid_value(P, ff, arrow.hbar, arrow.y, arrow.k)
        scale = max(abs(e1), 1.0)
        result.check(abs(e1 - e2) / scale, tol,
                     {"law": "f** = f", "arrow": (arrow.hbar, arrow.y, arrow.k)})

        lhs_el_value = al.convolve(P, f, g, arrow.hbar,
                                   tuple(c + arrow.hbar * ki
                                         for c, ki in zip(arrow.y, arrow.k)),
                                   tuple(-ki for ki in arrow.k))
        lhs = lhs_el_value.conjugate()
        rhs = al.convolve(P, al.involution(g), al.involution(f),
                          arrow.hbar, arrow.y, arrow.k)
        scale = max(abs(lhs), abs(rhs), 1.0)
        result.check(abs(lhs - rhs) / scale, tol,
                     {"law": "(f.g)* = g*.f*",
                      "arrow": (arrow.hbar, arrow.y, arrow.k)})
    return result


def battery_representation(P, rng, cases, tol) -> BatteryResult:
    """pi(f.g) = pi(f) pi(g) and pi(f*) = pi(f)^dagger on random orbits."""
    result = BatteryResult("representation", 0)
    for _ in range(cases):
        f = random_element(P, rng, allow_h=True)
        g = random_element(P, rng, allow_h=True)
        hbar = Fraction(1, rng.choice((4, 5, 8)))
        y0 = random_interior_point(P, rng)
        rep = mr.orbit_rep(P, hbar, y0)
        Mf = mr.represent(P, rep, f)
        Mg = mr.represent(P, rep, g)
        prod = Mf @ Mg
        direct = np.zeros_like(prod)
        ks = {tuple(a + b for a, b in zip(l, m))
              for l, _ in f.modes for m, _ in g.modes}
        for i, u in enumerate(rep.orbit.points):
            for k in ks:
                j = rep.orbit.target_index(i, k)
                if j is not None:
                    direct[i, j] += al.convolve(P, f, g, hbar, u, k)
        scale = max(np.abs(prod).max(), 1.0)
        result.check(float(np.abs(prod - direct).max()) / scale, tol,
                     {"law": "pi(f.g) = pi(f)pi(g)", "hbar": hbar, "y0": y0})
        Mfs = mr.represent(P, rep, al.involution(f))
        result.check(float(np.abs(Mfs - Mf.conj().T).max()) / scale, tol,
                     {"law": "pi(f*) = pi(f)^dagger", "hbar": hbar, "y0": y0})
    return result


def battery_bracket(P, rng, cases, tol) -> BatteryResult:
    """Bracket laws at the zero fiber: antisymmetry, bilinearity, Leibniz,
    Jacobi; plus agreement of the numeric limit with the symbolic value."""
    result = BatteryResult("bracket", 0)
    n = P.n
    for case in range(cases):
        f = random_element(P, rng, polynomial_only=True)
        g = random_element(P, rng, polynomial_only=True)
        h = random_element(P, rng, polynomial_only=True)
        y = [float(c) for c in random_interior_point(P, rng)]
        k = tuple(rng.randint(-2, 2) for _ in range(n))

        b_fg = al.bracket_element(f, g)
        b_gf = al.bracket_element(g, f)
        v1 = al.extension_value(b_fg, 0, y, k)
        v2 = al.extension_value(b_gf, 0, y, k)
        scale = max(abs(v1), 1.0)
        result.check(abs(v1 + v2) / scale, tol, {"law": "antisymmetry", "k": k})

        lin = al.bracket_element(f + g, h)
        split = al.bracket_element(f, h) + al.bracket_element(g, h)
        v1 = al.extension_value(lin, 0, y, k)
        v2 = al.extension_value(split, 0, y, k)
        scale = max(abs(v1), 1.0)
        result.check(abs(v1 - v2) / scale, tol, {"law": "bilinearity", "k": k})

        leib_l = al.bracket_element(f, al.pointwise_product_at_zero(g, h))
        leib_r = (al.pointwise_product_at_zero(al.bracket_element(f, g), h)
                  + al.pointwise_product_at_zero(g, al.bracket_element(f, h)))
        v1 = al.extension_value(leib_l, 0, y, k)
        v2 = al.extension_value(leib_r, 0, y, k)
        scale = max(abs(v1), abs(v2), 1.0)
        result.check(abs(v1 - v2) / scale, tol, {"law": "Leibniz", "k": k})

        jac = (al.bracket_element(f, al.bracket_element(g, h))
               + al.bracket_element(g, al.bracket_element(h, f))
               + al.bracket_element(h, al.bracket_element(f, g)))
        v = al.extension_value(jac, 0, y, k)
        parts = [abs(al.extension_value(
            al.bracket_element(a, al.bracket_element(b, c)), 0, y, k))
            for a, b, c in ((f, g, h), (g, h, f), (h, f, g))]
        scale = max(*parts, 1.0)
        result.check(abs(v) / scale, tol, {"law": "Jacobi", "k": k})

        if case % 10 == 0:
            yq = random_interior_point(P, rng, margin=Fraction(1, 4), denom=32)
            kq = tuple(rng.randint(-1, 1) for _ in range(n))
            hs = [Fraction(1, 2) ** i for i in range(5, 9)]
            try:
                lim = al.numeric_bracket_limit(P, f, g, yq, kq, hs)
            except al.MarginError:
                continue
            sym = al.symbolic_bracket(f, g, yq, kq)
            scale = max(abs(sym), 1.0)
            result.check(abs(lim.estimate - sym) / scale, 200 * tol,
                         {"law": "limit vs symbolic", "y": yq, "k": kq})
    return result


def battery_membership(P, rng, cases) -> BatteryResult:
    """Facet-based membership agrees with isotropy-based membership, and
    Delta(k) = Delta and U(k) intersected (exact, no tolerance)."""
    from .polytope import in_delta_k, in_u_k
    result = BatteryResult("membership", 0)
    for _ in range(cases):
        y = random_point_near(P, rng)
        hbar = Fraction(rng.randint(-8, 8), 16)
        k = tuple(rng.randint(-5, 5) for _ in range(P.n))
        g = gr.GroupoidPoint(hbar, y, k)
        a = gr.is_member(P, g)
        b = gr.is_member_isotropy(P, g)
        result.check(0.0 if a == b else 1.0, 0.5,
                     {"law": "facet vs isotropy", "arrow": (hbar, y, k)})
        if P.contains(y):
            lhs = in_delta_k(P, y, k)
            rhs = P.contains(y) and in_u_k(P, y, k)
            result.check(0.0 if lhs == rhs else 1.0, 0.5,
                         {"law": "Delta(k) = Delta ∩ U(k)", "y": y, "k": k})
    return result


def battery_delzant(P, rng, cases, tol) -> BatteryResult:
    """Construction identities: A B = 0, unit Smith diagonal, exact section
    identity, character invariance under the reduction torus, weights."""
    result = BatteryResult("delzant", 0)
    sys = dz.build_system(P)
    zero = (sys.A @ sys.B == np.zeros((sys.n, sys.d), dtype=object)).all()
    result.check(0.0 if zero else 1.0, 0.5, {"law": "A B = 0"})
    _, D, _ = intlat.smith_normal_form(sys.A)
    ones = all(D[i, i] == 1 for i in range(sys.n))
    result.check(0.0 if ones else 1.0, 0.5, {"law": "unit Smith diagonal"})
    for _ in range(cases):
        y = random_interior_point(P, rng)
        sq = dz.sigma_squared(sys, y)
        j0 = dz.J0_squared(sys, sq)
        aty = tuple(sys.P.pairing(y, j) for j in range(sys.n0))
        result.check(0.0 if j0 == aty else 1.0, 0.5,
                     {"law": "J0(sigma(y)) = A^T y", "y": y})
        jd = dz.Jd_squared(sys, sq)
        result.check(0.0 if all(v == 0 for v in jd) else 1.0, 0.5,
                     {"law": "J_d(sigma(y)) = 0", "y": y})
        z = dz.sigma(sys, y)
        k = tuple(rng.randint(-2, 2) for _ in range(P.n))
        if sys.d:
            t = [rng.uniform(0, 2 * math.pi) for _ in range(sys.d)]
            moved = dz.act_subtorus(sys, t, z)
            err = abs(dz.k_sigma_ambient(sys, moved, k)
                      - dz.k_sigma_ambient(sys, z, k))
            result.check(err, tol, {"law": "T^d invariance", "y": y, "k": k})
        theta = [rng.uniform(0, 2 * math.pi) for _ in range(P.n)]
        moved = dz.act_torus(sys, theta, z)
        expected = complex(math.cos(sum(a * b for a, b in zip(k, theta))),
                           math.sin(sum(a * b for a, b in zip(k, theta))))
        err = abs(dz.k_sigma_ambient(sys, moved, k)
                  - expected * dz.k_sigma_ambient(sys, z, k))
        result.check(err, tol, {"law": "torus weights", "y": y, "k": k})
    return result


def battery_classical(P, rng, cases, tol) -> BatteryResult:
    """Quantum-classical agreement and reality of brackets of real functions."""
    result = BatteryResult("classical", 0)
    for _ in range(cases):
        f = random_element(P, rng)
        g = random_element(P, rng)
        y = random_interior_point(P, rng)
        theta = [rng.uniform(0, 2 * math.pi) for _ in range(P.n)]
        lhs = cl.synthesize(P, al.bracket_element(f, g), y, theta)
        rhs = cl.poisson_bracket_aa(f, g, y, theta)
        scale = max(abs(lhs), abs(rhs), 1.0)
        result.check(abs(lhs - rhs) / scale, tol,
                     {"law": "mode bracket vs action-angle", "y": y})

        fr = _realify(f)
        gr_ = _realify(g)
        val = cl.poisson_bracket_aa(fr, gr_, y, theta)
        result.check(abs(val.imag) / max(abs(val), 1.0), tol,
                     {"law": "real functions close under bracket", "y": y})
    return result


def _realify(f: al.AlgebraElement) -> al.AlgebraElement:
    """f + f* restricted to the zero fiber (a real classical function)."""
    return al.pointwise_product_at_zero(
        al.element(f.n, {tuple([0] * f.n): "1"}),
        (f + al.involution(f)).subs_h_zero())


def run_suite(P: DelzantPolytope, seed: int, tol: float = 1e-10,
              cases: int = 40) -> SuiteReport:
    """Run all batteries with one seeded generator; deterministic."""
    rng = random.Random(seed)
    batteries = [
        battery_membership(P, rng, cases * 5),
        battery_associativity(P, rng, cases, tol),
        battery_involution(P, rng, cases, tol),
        battery_representation(P, rng, max(cases // 4, 5), tol),
        battery_bracket(P, rng, cases, tol),
        battery_delzant(P, rng, cases, tol),
        battery_classical(P, rng, cases, tol),
    ]
    from .polytope import polytope_to_dict
    return SuiteReport(polytope_to_dict(P), seed, tol, batteries)
