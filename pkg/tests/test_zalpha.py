import math

import pytest
from hypothesis import given, strategies as st

from thetazeta.errors import DomainError, GateError, PoleError
from thetazeta.oracle import cuspform_l_oracle, zeta_star_oracle
from thetazeta.theta import CuspFormSpec, bundled_character, delta_form, kronecker_character
from thetazeta.zalpha import gamma_alpha_direct, z_alpha, z_alpha_chi, z_alpha_f, z_pair, zeta_star

from frozen import GAMMA_ALPHA, LSTAR_DELTA, ZETA_STAR, Z_ALPHA


@pytest.mark.parametrize("args,ref", Z_ALPHA)
def test_z_alpha_frozen(args, ref):
    s, a = args
    assert abs(z_alpha(s, a) - ref) <= 1e-12 * max(1, abs(ref))


@pytest.mark.parametrize("s,ref", ZETA_STAR)
def test_zeta_star_frozen(s, ref):
    assert abs(zeta_star(s) - ref) <= 1e-12


def test_zeta_star_two():
    assert abs(zeta_star(2) - math.pi / 6) < 1e-15


@given(st.floats(-2, 3), st.floats(-20, 20), st.sampled_from([0.25, 0.5, 1.0, 1.5]))
def test_functional_equation(sr, si, a):
    s = complex(sr, si)
    if min(abs(s), abs(s - a)) < 1e-3:
        return
    assert abs(z_alpha(s, a) - z_alpha(a - s, a)) <= 1e-9


def test_functional_equation_symmetric_point():
    assert abs(z_alpha(0.25 + 0.17, 0.5) - z_alpha(0.25 - 0.17, 0.5)) < 1e-14


@given(st.floats(-2, 3), st.floats(-20, 20))
def test_oracle_agreement(sr, si):
    s = complex(sr, si)
    if min(abs(s), abs(s - 1)) < 1e-3:
        return
    assert abs(z_alpha(s, 1.0) - zeta_star_oracle(s)) <= 1e-9


def test_residue_at_alpha_converges():
    errs = [abs(10.0 ** -k * z_alpha(0.5 + 10.0 ** -k, 0.5) - 1) for k in (2, 3, 4)]
    assert errs[0] > errs[1] > errs[2]
    # the leading correction is gamma_alpha * h
    assert abs(errs[2] - abs(GAMMA_ALPHA[1][1]) * 1e-4) < 1e-7


def test_residue_at_zero_first_order():
    h = 1e-4
    # s Z(s) + 1 = gamma_alpha s + O(s^2) by the reflection s -> alpha - s
    assert abs(h * z_alpha(h, 0.5) + 1 - GAMMA_ALPHA[1][1] * h) < 1e-7


@pytest.mark.parametrize("a,ref", GAMMA_ALPHA)
def test_gamma_alpha_direct(a, ref):
    assert abs(gamma_alpha_direct(a) - ref) < 1e-12


def test_vertical_decay():
    assert abs(z_alpha(0.25 + 40j, 0.5)) <= 1e-3 * abs(z_alpha(0.25 + 5j, 0.5))


def test_pole_guard():
    with pytest.raises(PoleError):
        z_alpha(0.5 + 1e-8, 0.5)
    with pytest.raises(PoleError):
        z_alpha(1e-9, 0.5)
    with pytest.raises(DomainError):
        z_alpha(1.0, -0.5)


def test_z_pair_matches_sum_and_is_finite_at_half():
    s = 0.3 + 0.2j
    assert abs(z_pair(s, 0.25) - (z_alpha(s, 0.75) + z_alpha(1 - s, 0.25))) < 1e-13
    assert math.isfinite(abs(z_pair(0.5, 0.5)))


def test_chi_functional_equation_and_value():
    chi = bundled_character("-4")
    s = 0.8 + 0.3j
    assert abs(z_alpha_chi(s, 0.5, chi) - z_alpha_chi(0.5 - s, 0.5, chi)) < 1e-12
    assert abs(z_alpha_chi(1, 1, chi) - 1) < 1e-12


def test_chi_gate():
    with pytest.raises(GateError):
        z_alpha_chi(1.0, 0.5, kronecker_character(-19))


@pytest.mark.parametrize("s,ref", LSTAR_DELTA)
def test_cusp_alpha_one_frozen(s, ref):
    assert abs(z_alpha_f(s, 1.0, delta_form()) - ref) <= 1e-13


def test_cusp_symmetry_and_reality():
    f = delta_form()
    assert abs(z_alpha_f(3 + 1.3, 0.5, f) - z_alpha_f(3 - 1.3, 0.5, f)) < 1e-14
    assert z_alpha_f(2.2, 0.5, f).imag == 0
    assert abs(z_alpha_f(6, 1, f) - cuspform_l_oracle(6, f)) < 1e-12


def test_cusp_needs_self_dual():
    f = delta_form()
    g = CuspFormSpec(weight=12, level=1, coeffs=f.exact_coefficients(200), fricke_self_dual=False)
    with pytest.raises((DomainError, GateError)):
        z_alpha_f(6, 1, g)
