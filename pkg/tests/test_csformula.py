import math

import pytest

from thetazeta.csformula import (
    critical_line_form,
    cusp_edge_value,
    cuspform_series,
    cuspform_special_values,
    dirichlet_series,
    dirichlet_special_values,
    make_budget,
    riemann_series,
    riemann_series_divisor,
    zeta_fig_approx,
)
from thetazeta.errors import ConvergenceError, DomainError, GateError
from thetazeta.oracle import (
    cuspform_l_oracle,
    dirichlet_completion,
    dirichlet_l_oracle,
    zeta_em,
    zeta_star_oracle,
)
from thetazeta.powcoeffs import perturbed, theta_stream
from thetazeta.theta import bundled_character, delta_form, kronecker_character
from thetazeta.zalpha import z_alpha_f, zeta_star

from frozen import LSTAR_DELTA, L_HALF_CHI4, ZETA_STAR

TOL = 1e-11


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("s", [2.0, 0.3 + 2j, -0.7 + 3j, 1.5 - 25j, 0.5 + 39.5j, -1 - 11j])
def test_riemann_series_identity(alpha, s):
    assert abs(riemann_series(s, alpha) - zeta_star(s)) <= 2 * TOL


@pytest.mark.parametrize("s,ref", ZETA_STAR)
def test_riemann_series_frozen(s, ref):
    assert abs(riemann_series(s, 0.5) - ref) <= 2 * TOL


def test_rearrangement():
    for s in (0.3 + 2j, -0.5 + 17j, 1.9 - 33j):
        for a in (0.25, 0.5):
            assert abs(riemann_series(s, a) - riemann_series_divisor(s, a)) <= 1e-10


@pytest.mark.parametrize("t", [0.0, 3.3, 14.134725, 27.0, 39.9])
def test_critical_line_form(t):
    assert abs(critical_line_form(t) - riemann_series(complex(0.5, t), 0.5)) <= 1e-10
    assert abs(critical_line_form(t).imag) < 1e-14


def test_conjugate_symmetry():
    s = 0.7 + 9j
    assert abs(riemann_series(s.conjugate(), 0.5) - riemann_series(s, 0.5).conjugate()) < 1e-14
    chi = bundled_character("-4")
    assert abs(dirichlet_series(s.conjugate(), 0.5, chi) - dirichlet_series(s, 0.5, chi).conjugate()) < 1e-14
    f, sf = delta_form(), 6.5 + 3j
    assert abs(cuspform_series(sf.conjugate(), 0.5, f) - cuspform_series(sf, 0.5, f).conjugate()) < 1e-14


def test_fault_injection_is_detected():
    s = 2.0
    clean = abs(riemann_series(s, 0.5) - zeta_star(s))
    with perturbed(theta_stream(0.5), 2, 1e-6):
        bad = abs(riemann_series(s, 0.5) - zeta_star(s))
    assert clean <= 2 * TOL < bad


def test_budget_tail_dominates_change():
    s = 0.4 + 6j
    b = make_budget("theta", s, 1e-8)
    change = abs(riemann_series(s, 0.5, cutoff=2 * b.mn_cutoff) - riemann_series(s, 0.5, cutoff=b.mn_cutoff))
    assert change <= b.est_tail <= 1e-8


def test_budget_bad_inputs():
    with pytest.raises(DomainError):
        make_budget("theta", 2, 0)
    with pytest.raises(DomainError):
        make_budget("other", 2, 1e-8)


@pytest.mark.parametrize("label", ["-3", "-4", "8", "-8"])
@pytest.mark.parametrize("s", [2.0, 0.5 + 7j, -0.8 - 13j, 1.0])
def test_dirichlet_identity(label, s):
    chi = bundled_character(label)
    ref = dirichlet_completion(s, chi) * dirichlet_l_oracle(s, chi)
    assert abs(dirichlet_series(s, 0.5, chi) - ref) <= 2 * TOL


def test_dirichlet_alpha_independent():
    chi = bundled_character("-3")
    s = 0.6 + 4j
    assert abs(dirichlet_series(s, 0.3, chi) - dirichlet_series(s, 0.5, chi)) <= 2 * TOL


def test_dirichlet_special_values():
    v = dirichlet_special_values(bundled_character("-4"))
    assert abs(v["L(1)"] - math.pi / 4) < 1e-10
    assert abs(v["L(1/2)"] - L_HALF_CHI4) < 1e-10


def test_dirichlet_mod5_diverges():
    with pytest.raises(ConvergenceError):
        dirichlet_series(2.0, 0.5, bundled_character("5"))


def test_dirichlet_gate():
    with pytest.raises(GateError):
        dirichlet_series(2.0, 0.5, kronecker_character(-19))


@pytest.mark.parametrize("s,ref", LSTAR_DELTA)
def test_cuspform_frozen(s, ref):
    for a in (0.4, 0.5):
        assert abs(cuspform_series(s, a, delta_form()) - ref) <= 2 * TOL


def test_cuspform_vs_integral():
    f = delta_form()
    for s in (4.2 + 9j, 8.8 - 3j):
        assert abs(cuspform_series(s, 0.5, f) - z_alpha_f(s, 1.0, f)) <= 2 * TOL


def test_cusp_special_values():
    f = delta_form()
    edge = cusp_edge_value(f)
    ref_edge = (cuspform_l_oracle(6.5, f) * (2 * math.pi) ** 6.5 / math.gamma(6.5)).real
    assert abs(edge - ref_edge) < 1e-10
    v = cuspform_special_values(f)
    assert abs(v["edge"] - edge) < 1e-10
    ref_center = (cuspform_l_oracle(6, f) * (2 * math.pi) ** 6 / math.gamma(6)).real
    assert abs(v["center"] - ref_center) < 1e-10


def test_fig_approx_auto_matches_zeta():
    for t in (0.05, 7.3, 14.134725, 39.95):
        assert abs(abs(zeta_fig_approx(t)) - abs(zeta_em(0.5 + 1j * t))) < 1e-8


def test_fig_approx_truncations_and_t_zero():
    t = 10.0
    ref = zeta_em(0.5 + 1j * t)
    assert abs(zeta_fig_approx(t, n_max=200) - ref) < 1e-8
    assert zeta_fig_approx(t, n_max=0) != zeta_fig_approx(t, n_max=3)
    with pytest.raises(DomainError):
        zeta_fig_approx(0.0)
    with pytest.raises(DomainError):
        zeta_fig_approx(1.0, n_max=-1)


def test_large_modulus_budget_beyond_theta_depth():
    # chi_8 at alpha = 1/4 needs more than 10^4 coefficients for 1e-11
    chi = bundled_character("8")
    s = -0.86 + 12.67j
    ref = dirichlet_completion(s, chi) * dirichlet_l_oracle(s, chi)
    assert abs(dirichlet_series(s, 0.25, chi) - ref) <= 2 * TOL
