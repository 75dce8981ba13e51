import math

import pytest

from thetazeta.csformula import riemann_series
from thetazeta.eisenstein import (
    EisensteinPoint,
    e_expansion,
    e_integral,
    gamma_alpha_const,
    kronecker_limit,
    kronecker_limit_extrapolated,
    richardson_symmetric,
)
from thetazeta.errors import DomainError, PoleError
from thetazeta.zalpha import z_alpha

from frozen import GAMMA_ALPHA

TOL = 1e-12


@pytest.mark.parametrize("y", [0.5, 1, 1.5, 2])
@pytest.mark.parametrize("s", [2, 0.8 + 2j, 0.5 + 5j])
@pytest.mark.parametrize("ab", [(0.5, 0.5), (0.3, 0.7)])
def test_integral_matches_expansion(y, s, ab):
    p = EisensteinPoint(y, s, *ab)
    assert abs(e_integral(p) - e_expansion(p)) <= 2 * TOL


def test_expansion_at_s_equal_beta():
    # the two Z poles cancel here; the circle mean must agree with the integral
    p = EisensteinPoint(1.5, 0.7, 0.3, 0.7)
    assert abs(e_integral(p) - e_expansion(p)) < 1e-12


@pytest.mark.parametrize("y", [0.5, 1.5, 2])
def test_modular_symmetry(y):
    s = 0.8 + 2j
    assert abs(e_expansion(EisensteinPoint(y, s, 0.5)) - e_expansion(EisensteinPoint(1 / y, s, 0.5))) <= 1e-9


@pytest.mark.parametrize("a", [0.5, 0.75])
def test_functional_equation(a):
    for s in (2, 0.8 + 2j):
        lhs = e_expansion(EisensteinPoint(1.5, s, a))
        assert abs(lhs - e_expansion(EisensteinPoint(1.5, 2 * a - s, a))) <= 1e-9


def test_residues():
    h = 1e-5
    for a, y in ((0.5, 1.5), (0.75, 0.5)):
        assert abs(h * e_integral(EisensteinPoint(y, 2 * a + h, a)) - 1) <= 1e-4
        assert abs(h * e_integral(EisensteinPoint(y, h, a)) + 1) <= 1e-4


def test_specialization_to_zeta():
    for s in (2, 0.8 + 2j):
        assert abs(e_expansion(EisensteinPoint(1, s, 0.5)) - riemann_series(s, 0.5)) <= 1e-10
    assert abs(e_expansion(EisensteinPoint(1, 2, 0.5)) - math.pi / 6) < 1e-12


def test_remainder_regular_near_poles():
    a, y, h = 0.5, 1.5, 1e-4

    def rem(s):
        e = e_integral(EisensteinPoint(y, s, a))
        return e - z_alpha(s, a) * y ** s - z_alpha(s - a, a) * y ** (2 * a - s)

    for pole in (0.0, 2 * a):
        assert abs(rem(pole + h) - rem(pole - h)) < 1e-6


def test_point_validation_and_pole_guard():
    with pytest.raises(DomainError):
        EisensteinPoint(0, 2, 0.5)
    with pytest.raises(DomainError):
        EisensteinPoint(1, 2, -1)
    with pytest.raises(PoleError):
        e_integral(EisensteinPoint(1, 1e-8, 0.5))


@pytest.mark.parametrize("a,ref", GAMMA_ALPHA)
@pytest.mark.parametrize("method", ["richardson", "direct", "symmetry"])
def test_gamma_alpha(a, ref, method):
    assert abs(gamma_alpha_const(a, method=method) - ref) < 1e-9


def test_richardson_on_known_limit():
    val, res = richardson_symmetric(lambda h: math.sin(h) / h + h)
    assert abs(val - 1) < 1e-13 and res < 1e-10


@pytest.mark.parametrize("y,a", [(1, 0.5), (2, 0.5), (1, 1.0), (0.5, 0.75)])
def test_kronecker_limit(y, a):
    lhs, _ = kronecker_limit_extrapolated(y, a)
    assert abs(kronecker_limit(y, a) - lhs) <= 1e-7


def test_kronecker_at_y_one_equals_gamma():
    # at y = 1 and alpha = 1/2, E is Z_1, so the constant is gamma_1
    assert abs(kronecker_limit(1, 0.5) - GAMMA_ALPHA[2][1]) < 1e-10
