"""Eisenstein-type series E_{alpha,beta}(y, s) built from two theta powers.

E is the Mellin transform of theta(y^2 t^2)^alpha theta(y^-2 t^2)^beta - 1.
Two independent evaluations are provided: the split integral (direct
quadrature) and the expansion Z_beta(s) y^s + Z_alpha(s-beta) y^{2beta-s}
plus a K-Bessel double series in 2 pi y^2 sqrt(mn).  Their agreement is the
main numerical check of the expansion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import get_precision
from .csformula import _budget_for, _sum_series, _theta_series_ab
from .errors import DomainError, PoleError
from .special_fn import EvalResult, QuadratureSpec, cutoff_for_decay, integrate_decaying
from .theta import theta0_minus_one
from .zalpha import gamma_alpha_direct, z_alpha

_MEAN_RADIUS = 0.05
_MEAN_POINTS = 32
RICHARDSON_STEPS = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True)
class EisensteinPoint:
    y: float
    s: complex
    alpha: float
    beta: float | None = None

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError("y must be positive")
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if self.beta is None:
            object.__setattr__(self, "beta", self.alpha)
        elif not self.beta > 0:
            raise DomainError("beta must be positive")
        object.__setattr__(self, "s", complex(self.s))


def _log_theta(x: np.ndarray) -> np.ndarray:
    # log theta(x) for real x > 0 via log1p on the side x >= 1
    big = np.maximum(x, 1.0 / x)
    lv = np.log1p(theta0_minus_one(big))
    return np.where(x >= 1.0, lv, lv - 0.5 * np.log(x))


def _pole_check(s: complex, poles, radius: float) -> None:
    for p in poles:
        if abs(s - p) < radius:
            raise PoleError(f"s = {s} is within {radius:g} of the pole at {p}")


def e_integral(p: EisensteinPoint, tol: float | None = None, full_output: bool = False):
    """E_{alpha,beta}(y, s) from the split integral, valid for s away from 0 and alpha+beta."""
    prec = get_precision()
    tol = prec.tol if tol is None else tol
    y, s, a, b = p.y, p.s, p.alpha, p.beta
    _pole_check(s, (0.0, a + b), prec.pole_guard)
    y2 = y * y
    e1, e2 = s - 1.0, a + b - s - 1.0
    ratio = y ** (b - a)

    def integrand(t):
        t2 = t * t
        l_up, l_dn = _log_theta(y2 * t2), _log_theta(t2 / y2)
        g1 = np.expm1(a * l_up + b * l_dn)
        g2 = np.expm1(a * l_dn + b * l_up)
        return g1 * t ** e1 + ratio * g2 * t ** e2

    rate = math.pi * min(y2, 1.0 / y2)
    sig = max(e1.real, e2.real, 0.0)
    T = cutoff_for_decay(rate, tol * 1e-2, power=2.0, sigma=sig, prefactor=4 * (a + b) * max(1.0, ratio))
    spec = QuadratureSpec(T, panel_count=max(16, int(4 * T)), nodes_per_panel=20,
                          target_abs_tol=tol, target_rel_tol=4e-16)
    res = integrate_decaying(integrand, 1.0, spec)
    val = ratio / (s - a - b) - 1.0 / s + res.value
    if full_output:
        return EvalResult(val, res.abs_err, 0, res.nodes)
    return val


def _expansion_raw(y: float, s: complex, a: float, b: float, tol: float) -> EvalResult:
    zb = z_alpha(s, b, tol=tol / 3, full_output=True)
    za = z_alpha(s - b, a, tol=tol / 3, full_output=True)
    ser = _theta_series_ab(s, a, b, 2 * math.pi * y * y, y ** b)
    budget = _budget_for(ser, tol / 3)
    sm, n = _sum_series(ser, budget.mn_cutoff, min(tol, 1e-13))
    val = zb.value * cmath.exp(s * math.log(y)) + za.value * cmath.exp((2 * b - s) * math.log(y)) + sm
    return EvalResult(val, zb.abs_err + za.abs_err + budget.est_tail, n, zb.nodes + za.nodes)


def e_expansion(p: EisensteinPoint, tol: float | None = None, full_output: bool = False):
    """E_{alpha,beta}(y, s) from the Z terms plus the K-Bessel double series.

    At s = beta the two Z terms have canceling poles; near that point the
    value is taken as the mean over a small circle (exact for analytic
    functions up to the trapezoid error of order r^32).
    """
    prec = get_precision()
    tol = prec.tol if tol is None else tol
    y, s, a, b = p.y, p.s, p.alpha, p.beta
    _pole_check(s, (0.0, a + b), prec.pole_guard)
    if abs(s - b) < 1e-3:
        r = min(_MEAN_RADIUS, 0.5 * b, 0.5 * a)
        pts = [s + r * cmath.exp(2j * math.pi * k / _MEAN_POINTS) for k in range(_MEAN_POINTS)]
        parts = [_expansion_raw(y, z, a, b, tol) for z in pts]
        res = EvalResult(sum(q.value for q in parts) / _MEAN_POINTS, max(q.abs_err for q in parts),
                         sum(q.terms for q in parts), sum(q.nodes for q in parts))
    else:
        res = _expansion_raw(y, s, a, b, tol)
    return res if full_output else res.value


# ---------------------------------------------------------------- pole limits


def richardson_symmetric(F, steps=RICHARDSON_STEPS) -> tuple[float, float]:
    """Limit of F(h) as h -> 0 for F analytic in h apart from a removed pole.

    Averages F(h) and F(-h) (odd terms cancel), then eliminates h^2 and h^4
    with the halving ratios.  Returns (value, residual) where the residual
    is the change of the last elimination step.
    """
    even = [0.5 * (F(h) + F(-h)) for h in steps]
    r = steps[0] / steps[1]
    if abs(steps[1] / steps[2] - r) > 1e-12:
        raise DomainError("Richardson steps must be geometric")
    first = [(r ** 2 * even[i + 1] - even[i]) / (r ** 2 - 1) for i in range(len(even) - 1)]
    second = (r ** 4 * first[1] - first[0]) / (r ** 4 - 1)
    return second, abs(second - first[1])


def gamma_alpha_const(alpha: float, tol: float | None = None, method: str = "richardson") -> float:
    """lim_{s -> alpha} (Z_alpha(s) - 1/(s - alpha)).

    ``method`` selects the path: ``"richardson"`` extrapolates
    Z_alpha(alpha + h) - 1/h; ``"direct"`` uses the integral with the pole
    term removed analytically; ``"symmetry"`` extrapolates
    Z_alpha(h) + 1/h at the other pole.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    tol = get_precision().tol if tol is None else tol
    if method == "direct":
        return gamma_alpha_direct(alpha, tol)
    if method == "richardson":
        val, _ = richardson_symmetric(lambda h: (z_alpha(alpha + h, alpha, tol * 1e-2) - 1.0 / h).real)
        return val
    if method == "symmetry":
        val, _ = richardson_symmetric(lambda h: (z_alpha(h, alpha, tol * 1e-2) + 1.0 / h).real)
        return val
    raise DomainError(f"unknown method {method!r}")


def kronecker_limit(y: float, alpha: float, tol: float | None = None) -> float:
    """Constant term of E_alpha(y, s) at its pole s = 2 alpha.

    Z_alpha(2 alpha) y^{2 alpha} + gamma_alpha - log y
      + y^alpha sum c_alpha(m) c_alpha(n) (n/m)^{alpha/4} K_{alpha/2}(2 pi y^2 sqrt(mn)).

    The -log y comes from expanding y^{2 alpha - s} against the simple pole
    of Z_alpha(s - alpha); it vanishes at y = 1.
    """
    tol = get_precision().tol if tol is None else tol
    y, alpha = float(y), float(alpha)
    if not y > 0 or not alpha > 0:
        raise DomainError("y and alpha must be positive")
    s = 2 * alpha
    z = z_alpha(s, alpha, tol / 4).real
    g = gamma_alpha_direct(alpha, tol / 4)
    ser = _theta_series_ab(complex(s), alpha, alpha, 2 * math.pi * y * y, y ** alpha)
    budget = _budget_for(ser, tol / 4)
    sm, _ = _sum_series(ser, budget.mn_cutoff, min(tol, 1e-13))
    return z * y ** s + g - math.log(y) + sm.real


def kronecker_limit_extrapolated(y: float, alpha: float, tol: float | None = None) -> tuple[float, float]:
    """Richardson limit of E_alpha(y, 2 alpha + h) - 1/h from the split integral."""
    tol = get_precision().tol if tol is None else tol
    s0 = 2 * float(alpha)

    def F(h):
        return (e_integral(EisensteinPoint(y, s0 + h, alpha), tol * 1e-2) - 1.0 / h).real

    return richardson_symmetric(F)
