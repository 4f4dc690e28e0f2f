"""Convolution algebra laws, involution, and the two bracket routes."""
import math
import random
from fractions import Fraction

import pytest

from torikit import algebra as al
from torikit import expr as ex
from torikit import polytope as pt
from torikit import suite as su
from torikit.errors import DomainError, MarginError

F = Fraction
P = pt.interval()


def canonical_pair():
    return al.element(1, {1: "y1"}), al.element(1, {-1: "y1"})


def test_convolve_canonical_pair_hand_expansion():
    # single term l=1, m=-1: value y*(y+h)
    f, g = canonical_pair()
    for h, y in [(F(1, 4), F(1, 2)), (F(1, 8), F(1, 3)), (F(1, 16), F(3, 4))]:
        got = al.convolve(P, f, g, h, (y,), (0,))
        assert abs(got - float(y) * float(y + h)) < 1e-15


def test_convolve_unit_element_neutral():
    one = al.element(1, {0: "1"})
    g = al.element(1, {0: "y1^2", 1: "sin(y1)", -1: "cos(y1)"})
    rng = random.Random(3)
    for _ in range(30):
        h = F(rng.randint(1, 4), 16)
        y = (F(rng.randint(1, 15), 16),)
        k = (rng.randint(-1, 1),)
        assert abs(al.convolve(P, one, g, h, y, k)
                   - al.groupoid_value(P, g, h, y, k)) < 1e-15
        assert abs(al.convolve(P, g, one, h, y, k)
                   - al.groupoid_value(P, g, h, y, k)) < 1e-15


def test_convolve_disjoint_modes_additivity():
    e1 = al.element(1, {1: "1"})
    h, y = F(1, 8), (F(1, 2),)
    assert al.convolve(P, e1, e1, h, y, (2,)) == 1.0
    assert al.convolve(P, e1, e1, h, y, (0,)) == 0.0
    assert al.convolve(P, e1, e1, h, y, (1,)) == 0.0


def test_convolve_masks_invalid_factorizations():
    f, g = canonical_pair()
    # at y = 7/8 with h = 1/4 the intermediate point y + h leaves the polytope
    assert al.convolve(P, f, g, F(1, 4), (F(7, 8),), (0,)) == 0.0
    # while the reversed order is fine (intermediate y - h = 5/8)
    assert al.convolve(P, g, f, F(1, 4), (F(7, 8),), (0,)) != 0.0


def test_involution_zero_mode_conjugates():
    f = al.element(1, {0: ("y1", "1")})      # y + i
    s = al.involution(f)
    assert abs(s.coefficient((0,)).evaluate(0.25, [0.5]) - (0.5 - 1j)) < 1e-15


def test_involution_shifts_base_point():
    # (y e_1)* carries coefficient y - h on mode -1: the coefficient of the
    # inverse arrow (h, y, -1) is read at its own source y via y -> y - h
    f = al.element(1, {1: "y1"})
    s = al.involution(f)
    assert s.mode_keys() == [(-1,)]
    got = s.coefficient((-1,)).evaluate(0.25, [0.5])
    assert abs(got - (0.5 - 0.25)) < 1e-15


def test_involution_is_involutive_randomized():
    rng = random.Random(9)
    for _ in range(40):
        f = su.random_element(P, rng, allow_h=True)
        ff = al.involution(al.involution(f))
        h = F(rng.randint(1, 4), 16)
        y = [rng.uniform(0.1, 0.9)]
        for k, _ in f.modes:
            a = al.extension_value(f, h, y, k)
            b = al.extension_value(ff, h, y, k)
            assert abs(a - b) <= 1e-12 * (1 + abs(a))


def test_star_representation_identity_on_arrows():
    # (f*)(g) = conj(f(g^{-1})) pointwise on valid arrows
    rng = random.Random(21)
    for _ in range(40):
        f = su.random_element(P, rng, allow_h=True)
        g = su.random_arrow(P, rng)
        lhs = al.groupoid_value(P, al.involution(f), g.hbar, g.y, g.k)
        inv_y = tuple(c + g.hbar * ki for c, ki in zip(g.y, g.k))
        rhs = al.groupoid_value(P, f, g.hbar, inv_y,
                                tuple(-c for c in g.k)).conjugate()
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


def test_renormalized_commutator_exact_case():
    f, g = canonical_pair()
    for i in range(2, 11):
        h = F(1, 2) ** i
        for y in (F(3, 8), F(1, 2), F(5, 8)):
            got = al.renormalized_commutator(P, f, g, h, (y,), (0,))
            assert abs(got - (-2j * float(y))) <= 1e-12


def test_renormalized_commutator_rejects_zero():
    f, g = canonical_pair()
    with pytest.raises(DomainError):
        al.renormalized_commutator(P, f, g, 0, (F(1, 2),), (0,))


def test_commutator_same_element_vanishes():
    f = al.element(1, {0: "y1", 1: "sin(y1)"})
    assert al.commutator(P, f, f, F(1, 8), (F(1, 2),), (0,)) == 0.0


def test_commutator_mode_zero_pair_vanishes():
    f = al.element(1, {0: "y1^2"})
    g = al.element(1, {0: "exp(y1)"})
    rng = random.Random(17)
    for _ in range(20):
        h = F(rng.randint(1, 8), 32)
        y = (F(rng.randint(1, 31), 32),)
        assert al.commutator(P, f, g, h, y, (0,)) == 0.0


def test_symbolic_bracket_hand_value():
    f, g = canonical_pair()
    assert abs(al.symbolic_bracket(f, g, (0.5,), (0,)) - (-1j)) < 1e-15
    # mode-0-only pair brackets to zero
    a = al.element(1, {0: "y1^3"})
    b = al.element(1, {0: "sin(y1)"})
    assert al.symbolic_bracket(a, b, (0.5,), (0,)) == 0.0


def test_symbolic_bracket_bilinear():
    rng = random.Random(31)
    for _ in range(25):
        f = su.random_element(P, rng)
        g = su.random_element(P, rng)
        h = su.random_element(P, rng)
        y = [rng.uniform(0.2, 0.8)]
        k = (rng.randint(-2, 2),)
        lhs = al.symbolic_bracket(f + g, h, y, k)
        rhs = al.symbolic_bracket(f, h, y, k) + al.symbolic_bracket(g, h, y, k)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))
        scaled = f.scaled(F(3, 2))
        assert abs(al.symbolic_bracket(scaled, h, y, k)
                   - 1.5 * al.symbolic_bracket(f, h, y, k)) <= 1e-10


def test_numeric_limit_exact_case_reports_exact():
    f, g = canonical_pair()
    hs = [F(1, 2) ** i for i in range(2, 11)]
    lim = al.numeric_bracket_limit(P, f, g, (F(1, 2),), (0,), hs)
    assert lim.order == "exact"
    assert abs(lim.estimate - (-1j)) <= 1e-12


def test_numeric_limit_sin_pair_matches_symbolic():
    f = al.element(1, {1: "sin(y1)"})
    g = al.element(1, {-1: "1"})
    hs = [F(1, 2) ** i for i in range(4, 11)]
    lim = al.numeric_bracket_limit(P, f, g, (F(1, 2),), (0,), hs)
    sym = al.symbolic_bracket(f, g, (0.5,), (0,))
    assert abs(lim.estimate - sym) <= 1e-8
    assert isinstance(lim.order, float) and lim.order > 0.9


def test_numeric_limit_commuting_pair_zero():
    a = al.element(1, {0: "y1"})
    b = al.element(1, {0: "y1^2"})
    hs = [F(1, 2) ** i for i in range(3, 8)]
    lim = al.numeric_bracket_limit(P, a, b, (F(1, 2),), (0,), hs)
    assert lim.order == "exact" and lim.estimate == 0.0


def test_numeric_limit_validates_hbar_list():
    f, g = canonical_pair()
    with pytest.raises(DomainError):
        al.numeric_bracket_limit(P, f, g, (F(1, 2),), (0,), [F(1, 4), F(1, 2)])
    with pytest.raises(DomainError):
        al.numeric_bracket_limit(P, f, g, (F(1, 2),), (0,), [])


def test_numeric_limit_margin_guard_names_offender():
    f, g = canonical_pair()
    with pytest.raises(MarginError) as info:
        al.numeric_bracket_limit(P, f, g, (F(15, 16),), (0,), [F(1, 4), F(1, 8)])
    assert "19/16" in str(info.value)  # y + hbar_max * 1


def test_mode_zero_pair_renormalized_commutator_identically_zero():
    # zero-fiber functions commute: mode-0 elements have vanishing commutator
    rng = random.Random(23)
    for _ in range(20):
        a = al.element(1, {0: ex.ComplexExpr(
            ex.parse("y1^2 + h", 1), ex.parse("y1", 1))})
        b = al.element(1, {0: ex.ComplexExpr(
            ex.parse("sin(y1)*h", 1), ex.parse("2", 1))})
        h = F(rng.randint(1, 16), 64)
        y = (F(rng.randint(1, 63), 64),)
        assert al.commutator(P, a, b, h, y, (0,)) == 0.0


def test_observable_json_roundtrip(tmp_path):
    f = al.element(1, {1: ("y1", "1/2"), -1: "sqrt(y1*(1 - y1))"})
    doc = al.observable_to_dict(f)
    path = tmp_path / "obs.json"
    import json
    path.write_text(json.dumps(doc))
    g = al.load_observable(path, 1)
    assert g == f
