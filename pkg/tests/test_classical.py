"""Classical synthesis, Fourier analysis, action-angle bracket, pullback."""
import cmath
import math
import random
from fractions import Fraction

import pytest

from torikit import algebra as al
from torikit import classical as cl
from torikit import delzant as dz
from torikit import polytope as pt
from torikit import suite as su
from torikit.errors import AliasingError, DomainError, MarginError, StratumError

F = Fraction
P = pt.interval()


def test_synthesize_mode_zero_is_plain_function():
    f = al.element(1, {0: "y1*(1 - y1)"})
    for theta in (0.0, 1.3, -2.0):
        assert abs(cl.synthesize(P, f, (F(1, 4),), [theta]) - 0.1875) < 1e-15


def test_synthesize_cosine_pair():
    f = al.element(1, {1: "y1", -1: "y1"})
    got = cl.synthesize(P, f, (F(1, 2),), [0.0])
    assert abs(got - 1.0) < 1e-15
    got = cl.synthesize(P, f, (F(1, 2),), [math.pi / 3])
    assert abs(got - math.cos(math.pi / 3)) < 1e-14


def test_synthesize_stratum_error_on_boundary_mode():
    f = al.element(1, {1: "1"})
    with pytest.raises(StratumError) as info:
        cl.synthesize(P, f, (F(0),), [0.0])
    assert "(1,)" in str(info.value)


def test_synthesize_boundary_vanishing_coefficient_is_fine():
    # the coefficient vanishes on the stratum, so the mode is harmless there
    f = al.element(1, {1: "y1*(1 - y1)", 0: "y1"})
    assert cl.synthesize(P, f, (F(1),), [0.4]) == 1.0


def test_synthesize_outside_polytope():
    with pytest.raises(DomainError):
        cl.synthesize(P, al.element(1, {0: "1"}), (F(2),), [0.0])


def test_fourier_roundtrip_single_mode():
    for k in (-3, 0, 2):
        f = al.element(1, {k: "1"})
        modes = cl.fourier_roundtrip(P, f, (F(1, 2),), 16)
        assert abs(modes[(k,)] - 1) < 1e-12
        stray = max(abs(v) for key, v in modes.items() if key != (k,))
        assert stray < 1e-12


def test_fourier_roundtrip_three_modes():
    f = al.element(1, {0: "y1", 2: ("1 - y1", "1/3"), -1: "sin(y1)"})
    y = (F(1, 3),)
    modes = cl.fourier_roundtrip(P, f, y, 16)
    yf = [1 / 3]
    assert abs(modes[(0,)] - (1 / 3)) < 1e-10
    assert abs(modes[(2,)] - ((1 - 1 / 3) + 1j / 3)) < 1e-10
    assert abs(modes[(-1,)] - math.sin(1 / 3)) < 1e-10


def test_fourier_roundtrip_2d():
    S = pt.square()
    f = al.element(2, {(1, -2): "y1*y2", (0, 0): "2"})
    modes = cl.fourier_roundtrip(S, f, (F(1, 2), F(1, 4)), 8)
    assert abs(modes[(1, -2)] - 0.125) < 1e-12
    assert abs(modes[(0, 0)] - 2) < 1e-12


def test_fourier_aliasing_guard():
    f = al.element(1, {3: "1"})
    with pytest.raises(AliasingError):
        cl.fourier_roundtrip(P, f, (F(1, 2),), 6)


def test_aa_bracket_canonical_pair():
    f = al.element(1, {1: "y1"})
    g = al.element(1, {-1: "y1"})
    for theta in (0.0, 0.9, 2.7):
        got = cl.poisson_bracket_aa(f, g, (0.5,), [theta])
        assert abs(got - (-1j)) < 1e-14


def test_aa_bracket_antisymmetric_and_zero_on_actions():
    f = al.element(1, {0: "y1^2"})
    g = al.element(1, {0: "sin(y1)"})
    assert cl.poisson_bracket_aa(f, g, (0.5,), [1.0]) == 0
    h = al.element(1, {1: "y1", -2: ("1", "y1")})
    v1 = cl.poisson_bracket_aa(h, h, (0.5,), [1.0])
    assert abs(v1) < 1e-14


def test_quantum_classical_agreement_randomized():
    rng = random.Random(42)
    for P2 in (pt.interval(), pt.square(), pt.projective_space(2)):
        for _ in range(25):
            f = su.random_element(P2, rng)
            g = su.random_element(P2, rng)
            y = su.random_interior_point(P2, rng)
            theta = [rng.uniform(0, 2 * math.pi) for _ in range(P2.n)]
            lhs = cl.synthesize(P2, al.bracket_element(f, g), y, theta)
            rhs = cl.poisson_bracket_aa(f, g, y, theta)
            assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_real_functions_close_under_bracket():
    rng = random.Random(43)
    for _ in range(25):
        f = su.random_element(P, rng)
        fr = (f + al.involution(f)).subs_h_zero()
        g = su.random_element(P, rng)
        gr = (g + al.involution(g)).subs_h_zero()
        y = su.random_interior_point(P, rng)
        theta = [rng.uniform(0, 2 * math.pi)]
        # i * bracket of two real observables is real, so the bracket value
        # of the aa formula (which already folds the 1/i) must be real... the
        # bracket itself is purely a real function: check imaginary part
        val = cl.poisson_bracket_aa(fr, gr, y, theta)
        assert abs(val.imag) <= 1e-12 * (1 + abs(val))


def test_pullback_omega_interval_and_square():
    rng = random.Random(3)
    for P2 in (pt.interval(), pt.square()):
        sys = dz.build_system(P2)
        n = P2.n
        pairs = []
        for _ in range(20):
            mk = lambda: tuple(rng.uniform(-1, 1) for _ in range(n))
            pairs.append(((mk(), mk()), (mk(), mk())))
        y = tuple(F(1, 2) for _ in range(n))
        s = [rng.uniform(0, 2 * math.pi) for _ in range(n)]
        residual = cl.pullback_omega_check(sys, y, s, pairs)
        assert residual <= 1e-6


def test_pullback_pure_radial_and_pure_angular_vanish():
    rng = random.Random(4)
    sys = dz.build_system(pt.square())
    y = (F(1, 3), F(2, 5))
    s = [0.7, 1.9]
    zero = (0.0, 0.0)
    radial_pairs = []
    angular_pairs = []
    for _ in range(10):
        mk = lambda: tuple(rng.uniform(-1, 1) for _ in range(2))
        radial_pairs.append(((mk(), zero), (mk(), zero)))
        angular_pairs.append(((zero, mk()), (zero, mk())))
    assert cl.pullback_omega_check(sys, y, s, radial_pairs) <= 1e-6
    assert cl.pullback_omega_check(sys, y, s, angular_pairs) <= 1e-6


def test_pullback_margin_guard():
    sys = dz.build_system(pt.interval())
    with pytest.raises(MarginError):
        cl.pullback_omega_check(sys, (F(1, 1000),), [0.0],
                                [(((1.0,), (0.0,)), ((0.0,), (1.0,)))])
