"""Two-variable zeta functions built from fractional powers of theta series.

Z_alpha(s) is the Mellin transform of theta(t^2)^alpha - 1, continued to
the plane by splitting at t = 1 and reflecting the inner half with
theta(1/x) = sqrt(x) theta(x).  The character and cusp-form variants are
entire and use the same split.

For |Im s| large the integrand t^s oscillates while the result is
exponentially small, so the real-axis quadrature loses everything to
cancellation.  The theta version therefore runs along the ray
t = r e^{i phi}, phi = +-pi/5 (same sign as Im s); the rotated form is

    Z = e^{-i phi (alpha-s)}/(s-alpha) - e^{i phi s}/s + J(s, phi) + J(alpha-s, -phi),
    J(w, phi) = e^{i phi w} int_1^inf g(r e^{i phi}) r^{w-1} dr,

with g(t) = theta(t^2)^alpha - 1.  Since |arg t^2| <= 2 pi/5 < pi/2 the
theta sum still converges and |theta(t^2) - 1| < 1 on r >= 1, so the
principal logarithm is the analytic continuation from the real axis.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .config import get_precision
from .errors import DomainError, PoleError
from .special_fn import EvalResult, QuadratureSpec, cutoff_for_decay, integrate_decaying
from .theta import (CuspFormSpec, RealCharacter, log_cusp, log_theta_chi,
                    require_positive, theta0_minus_one)

ROTATION_ANGLE = math.pi / 5
ROTATE_ABOVE = 1.0  # |Im s| threshold for using the rotated ray
_REL_FLOOR = 4e-16


def rotation_angle(s: complex) -> float:
    t = complex(s).imag
    if abs(t) < ROTATE_ABOVE:
        return 0.0
    return math.copysign(ROTATION_ANGLE, t)


def pow1p_minus_one(u, alpha: float):
    """(1 + u)^alpha - 1 with full relative accuracy for small |u|."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-3
    out = np.empty_like(u)
    if np.any(small):
        us = u[small]
        term = np.ones_like(us)
        acc = np.zeros_like(us)
        coef = 1.0
        for j in range(1, 7):
            coef *= (alpha - j + 1) / j
            term = term * us
            acc = acc + coef * term
        out[small] = acc
    big = ~small
    if np.any(big):
        out[big] = np.exp(alpha * np.log1p(u[big])) - 1.0
    return out


def _g_theta(t, alpha: float):
    # theta(t^2)^alpha - 1 on complex t with Re(t^2) > 0
    return pow1p_minus_one(theta0_minus_one(t * t), alpha)


def _guard(s: complex, poles, radius: float) -> None:
    for p in poles:
        if abs(s - p) < radius:
            raise PoleError(f"s = {s} is within {radius:g} of the pole at {p}")


def _j_terms(alpha: float, terms, phi: float, tol: float, rel: float) -> EvalResult:
    """sum over (w, phi_w, weight) of weight * J(w, phi_w) on a common r-grid."""
    cos2 = math.cos(2 * max(abs(p) for _, p, _ in terms))
    sig = max(max(w.real for w, _, _ in terms) - 1.0, 0.0)
    R = cutoff_for_decay(math.pi * cos2, tol * 1e-2, power=2.0, sigma=sig,
                         prefactor=4 * alpha + 2)
    pre = [(w, p, c * cmath.exp(1j * p * w), cmath.exp(1j * p)) for w, p, c in terms]

    def integrand(r):
        acc = np.zeros(r.shape, dtype=complex)
        for w, p, coef, rot in pre:
            acc += coef * _g_theta(r * rot, alpha) * r ** (w - 1.0)
        return acc

    spec = QuadratureSpec(R, panel_count=16, nodes_per_panel=20,
                          target_abs_tol=tol, target_rel_tol=rel)
    return integrate_decaying(integrand, 1.0, spec)


def _finish(value: complex, res: EvalResult, full_output: bool):
    if full_output:
        return EvalResult(complex(value), res.abs_err, res.terms, res.nodes)
    return complex(value)


def z_alpha(s, alpha: float, tol: float | None = None, full_output: bool = False):
    """Z_alpha(s), meromorphic with simple poles at 0 (residue -1) and alpha (residue +1).

    Raises PoleError within ``pole_guard`` of either pole.
    """
    prec = get_precision()
    tol = prec.tol if tol is None else tol
    s = complex(s)
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    _guard(s, (0.0, alpha), prec.pole_guard)
    phi = rotation_angle(s)
    res = _j_terms(alpha, [(s, phi, 1.0), (alpha - s, -phi, 1.0)], phi, tol, _REL_FLOOR)
    rational = cmath.exp(-1j * phi * (alpha - s)) / (s - alpha) - cmath.exp(1j * phi * s) / s
    return _finish(rational + res.value, res, full_output)


def z_pair(s, alpha: float, tol: float | None = None, full_output: bool = False):
    """Z_beta(s) + Z_alpha(1 - s) with beta = 1 - alpha.

    The poles at s = beta cancel analytically, so only s = 0 and s = 1 are
    singular.
    """
    prec = get_precision()
    tol = prec.tol if tol is None else tol
    s = complex(s)
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    beta = 1.0 - alpha
    _guard(s, (0.0, 1.0), prec.pole_guard)
    phi = rotation_angle(s)
    rb = _j_terms(beta, [(s, phi, 1.0), (beta - s, -phi, 1.0)], phi, tol / 2, _REL_FLOOR)
    ra = _j_terms(alpha, [(1.0 - s, -phi, 1.0), (s - beta, phi, 1.0)], phi, tol / 2, _REL_FLOOR)
    rational = -cmath.exp(1j * phi * s) / s - cmath.exp(-1j * phi * (1.0 - s)) / (1.0 - s)
    merged = EvalResult(rb.value + ra.value, rb.abs_err + ra.abs_err, 0, rb.nodes + ra.nodes)
    return _finish(rational + merged.value, merged, full_output)


def zeta_star(s, tol: float | None = None, full_output: bool = False):
    """Completed Riemann zeta pi^{-s/2} Gamma(s/2) zeta(s), computed as Z_1(s)."""
    try:
        return z_alpha(s, 1.0, tol, full_output)
    except PoleError as exc:
        raise PoleError(str(exc).replace("alpha", "1")) from None


def gamma_alpha_direct(alpha: float, tol: float | None = None) -> float:
    """lim_{s->alpha} (Z_alpha(s) - 1/(s - alpha)) from the integral form.

    At s = alpha the two rational terms collapse to -1/alpha, leaving
    -1/alpha + int_1^inf (theta(t^2)^alpha - 1)(t^alpha + 1) dt/t.
    """
    tol = get_precision().tol if tol is None else tol
    res = _j_terms(alpha, [(complex(alpha), 0.0, 1.0), (0j, 0.0, 1.0)], 0.0, tol, _REL_FLOOR)
    return -1.0 / alpha + res.value.real


# ---------------------------------------------------------------- entire variants


def _real_axis(integrand, rate: float, power: float, sigma: float, prefactor: float,
               tol: float) -> EvalResult:
    T = cutoff_for_decay(rate, tol * 1e-2, power=power, sigma=sigma, prefactor=prefactor)
    n_panels = max(16, int(4 * (T - 1)))
    spec = QuadratureSpec(T, panel_count=n_panels, nodes_per_panel=20,
                          target_abs_tol=tol, target_rel_tol=_REL_FLOOR)
    return integrate_decaying(integrand, 1.0, spec)


def z_alpha_chi(s, alpha: float, chi: RealCharacter, tol: float | None = None,
                full_output: bool = False):
    """Z_alpha(s, chi): entire; symmetric under s -> alpha - s.

    int_1^inf theta(t^2, chi)^alpha (t^{s + delta alpha} + t^{alpha - s + delta alpha}) dt/t,
    with theta(t^2, chi)^alpha = exp(alpha log theta).  Requires the
    positivity gate for chi.
    """
    tol = get_precision().tol if tol is None else tol
    s = complex(s)
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    require_positive(chi)
    da = chi.delta * alpha
    e1, e2 = s + da - 1.0, alpha - s + da - 1.0

    def integrand(t):
        w = np.exp(alpha * log_theta_chi(t * t, chi))
        return w * (t ** e1 + t ** e2)

    sig = max(e1.real, e2.real, 0.0)
    res = _real_axis(integrand, math.pi * alpha / chi.modulus, 2.0, sig, 2.0 ** alpha * 2, tol)
    return _finish(res.value, res, full_output)


def z_alpha_f(s, alpha: float, f: CuspFormSpec, tol: float | None = None,
              full_output: bool = False):
    """Z_alpha(s, f) for a Fricke self-dual cusp form; symmetric under s -> k alpha - s.

    int_1^inf f(iy/sqrt(q))^alpha (y^s + y^{k alpha - s}) dy/y.
    """
    tol = get_precision().tol if tol is None else tol
    s = complex(s)
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if not f.fricke_self_dual:
        raise DomainError("the reflected integral needs a Fricke self-dual form")
    require_positive(f)
    k, sq = f.weight, math.sqrt(f.level)
    e1, e2 = s - 1.0, k * alpha - s - 1.0

    def integrand(y):
        w = np.exp(alpha * log_cusp(y / sq, f, tol=tol))
        return w * (y ** e1 + y ** e2)

    sig = max(e1.real, e2.real, 0.0)
    res = _real_axis(integrand, 2 * math.pi * alpha / sq, 1.0, sig, 2.0 ** alpha * 2, tol)
    return _finish(res.value, res, full_output)
