"""K-Bessel double-series expansions of completed zeta and L-functions.

Every series here has the shape

    factor * sum_{m, n} cA(m) cB(n) ((n + b)/(m + a))^p K_nu(kappa sqrt((m + a)(n + b)))

with coefficients from :mod:`powcoeffs`.  Pairs are enumerated in order of
increasing Bessel argument x, so truncation is a single cutoff X on x.  The
cutoff comes from an explicit tail majorant, see :func:`make_budget`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import get_precision
from .errors import ConvergenceError, DomainError
from .oracle import cusp_completion, dirichlet_completion
from .powcoeffs import chi_stream, cusp_stream, theta_stream
from .special_fn import EvalResult, bessel_k, complex_gamma
from .theta import CuspFormSpec, RealCharacter, require_positive
from .zalpha import z_alpha, z_pair

_ANNULUS = 30.0  # width of the x-range summed explicitly by the tail majorant
_X_MAX = 400.0
_GROWTH_LIMIT = 1e8  # a fitted constant beyond this signals exponential growth


@dataclass(frozen=True)
class TruncationBudget:
    """Cutoff X on the Bessel argument and the tail majorant it achieves."""

    mn_cutoff: float
    est_tail: float
    family: str = "theta"


@dataclass
class _Series:
    """Data for one double series (see module docstring)."""

    family: str
    streamA: object
    offA: float
    streamB: object
    offB: float
    start: int
    kappa: float
    nu: complex
    p: complex
    factor: float
    power: float  # growth exponent for the coefficient majorant
    fit_depth: int = 2000  # range used to fit the growth constant

    def growth(self) -> tuple[float, float]:
        return (self.streamA.growth_constant(self.power, self.fit_depth),
                self.streamB.growth_constant(self.power, self.fit_depth))


def _k_bound(a: float, x: np.ndarray) -> np.ndarray:
    """Majorant for |K_{a + ib}(x)| <= K_|a|(x)."""
    base = np.sqrt(math.pi / (2 * x)) * np.exp(-x)
    if a <= 0.5:
        return base
    return base * (1.0 - (a - 0.5) / (2 * x)) ** (-(a + 0.5))


def _index_cap(ser: _Series, X: float) -> int:
    # largest m (or n) with kappa sqrt((m + a)(start + b)) <= X
    low = min(ser.start + ser.offA, ser.start + ser.offB)
    return int((X / ser.kappa) ** 2 / low) + 1


def _majorant_table(ser: _Series, X_hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Bessel arguments x <= X_hi of all index pairs, sorted, with the
    majorant of their terms summed from each x to the end of the table.

    |c(m)| <= C (m+1)^P with an empirically fitted C (ten times the largest
    observed ratio) and |K_{a+ib}(x)| <= K_|a|(x).  Every index pair is
    included, zero coefficients or not, so the table is conservative.
    """
    CA, CB = ser.growth()
    k2 = ser.kappa ** 2
    m_top = int((X_hi * X_hi / k2) / (ser.start + ser.offB) - ser.offA)
    ms = np.arange(ser.start, max(m_top, ser.start) + 1)
    n_hi = np.floor(X_hi * X_hi / (k2 * (ms + ser.offA)) - ser.offB).astype(np.int64)
    counts = np.maximum(n_hi - ser.start + 1, 0)
    M = np.repeat(ms, counts).astype(float)
    first = np.repeat(np.cumsum(counts) - counts, counts)
    N = (np.arange(M.size) - first + ser.start).astype(float)
    ma, nb = M + ser.offA, N + ser.offB
    x = ser.kappa * np.sqrt(ma * nb)
    terms = (CA * (M + 1) ** ser.power * CB * (N + 1) ** ser.power
             * (nb / ma) ** ser.p.real * _k_bound(abs(ser.nu.real), x))
    order = np.argsort(x, kind="stable")
    # suffix sums from the large-x end keep small tails free of cancellation
    suffix = np.concatenate((np.cumsum(terms[order][::-1])[::-1], [0.0]))
    return x[order], suffix


def _tail_from_table(table, X: float) -> float:
    x, suffix = table
    lo = np.searchsorted(x, X, side="right")
    hi = np.searchsorted(x, X + _ANNULUS, side="right")
    return float(suffix[lo] - suffix[hi])


def tail_majorant(ser: _Series, X: float) -> float:
    """Bound on the discarded terms with X < x <= X + annulus.

    Pairs beyond the annulus carry an extra factor of at least e^{-30} and
    are dropped from the bound.
    """
    return abs(ser.factor) * _tail_from_table(_majorant_table(ser, X + _ANNULUS), X)


def _budget_for(ser: _Series, tol: float) -> TruncationBudget:
    CA, CB = ser.growth()
    if max(CA, CB) > _GROWTH_LIMIT:
        # the normalised base series has a zero inside |q| < 1, so the
        # power-series coefficients grow geometrically and the sum diverges
        raise ConvergenceError(
            f"coefficients of the {ser.family} power series grow exponentially "
            f"(fitted constant {max(CA, CB):.2e}); the double series does not converge")
    depth = min(ser.streamA.max_depth, ser.streamB.max_depth)
    X_hi = 40.0
    while True:
        table = _majorant_table(ser, X_hi + _ANNULUS)
        for X in np.arange(6.0, X_hi + 0.25, 0.5):
            if _index_cap(ser, X) >= depth:
                break
            bound = abs(ser.factor) * _tail_from_table(table, X)
            if bound <= tol:
                return TruncationBudget(float(X), bound, ser.family)
        X_hi *= 1.5
        if X_hi > _X_MAX or _index_cap(ser, X) >= depth:
            raise ConvergenceError(f"tolerance {tol:g} needs more coefficients than the cache depth allows")


def _nonzero(stream, start: int, cap: int) -> tuple[np.ndarray, np.ndarray]:
    arr = stream.array(cap)
    idx = np.nonzero(arr)[0]
    idx = idx[idx >= start]
    return idx, arr[idx]


def _pairs(ser: _Series, X: float):
    """Index pairs with x <= X, sorted by x (ties by m then n)."""
    cap = _index_cap(ser, X)
    im, cm = _nonzero(ser.streamA, ser.start, cap)
    jn, cn = _nonzero(ser.streamB, ser.start, cap)
    k2 = ser.kappa ** 2
    rows = []
    for m, c in zip(im.tolist(), cm.tolist()):
        ma = m + ser.offA
        lim = X * X / (k2 * ma) - ser.offB
        if lim < ser.start:
            break
        sel = jn <= lim
        if not sel.any():
            continue
        nn = jn[sel]
        rows.append((np.full(nn.size, m), nn, c * cn[sel]))
    if not rows:
        z = np.zeros(0)
        return z.astype(int), z.astype(int), z, z
    M = np.concatenate([r[0] for r in rows])
    N = np.concatenate([r[1] for r in rows])
    C = np.concatenate([r[2] for r in rows])
    prod = (M + ser.offA) * (N + ser.offB)
    x = ser.kappa * np.sqrt(prod)
    order = np.lexsort((N, M, x))
    return M[order], N[order], C[order], x[order]


def _sum_series(ser: _Series, X: float, ktol: float) -> tuple[complex, int]:
    M, N, C, x = _pairs(ser, X)
    kcache: dict = {}
    re, im = [], []
    for m, n, c, xv in zip(M.tolist(), N.tolist(), C.tolist(), x.tolist()):
        k = kcache.get(xv)
        if k is None:
            k = bessel_k(ser.nu, xv, tol=ktol)
            kcache[xv] = k
        ratio = (n + ser.offB) / (m + ser.offA)
        term = c * cmath.exp(ser.p * math.log(ratio)) * k
        re.append(term.real)
        im.append(term.imag)
    return ser.factor * complex(math.fsum(re), math.fsum(im)), len(re)


def _evaluate(ser: _Series, tol: float, X: float | None = None) -> EvalResult:
    budget = _budget_for(ser, tol) if X is None else TruncationBudget(X, tail_majorant(ser, X), ser.family)
    val, n = _sum_series(ser, budget.mn_cutoff, min(tol, 1e-13))
    return EvalResult(val, budget.est_tail, n, 0)


# ---------------------------------------------------------------- families


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _theta_series(s: complex, alpha: float, kappa: float = 2 * math.pi, factor: float = 1.0) -> _Series:
    beta = 1.0 - alpha if alpha < 1 else alpha
    return _theta_series_ab(s, alpha, beta, kappa, factor)


def _theta_series_ab(s: complex, alpha: float, beta: float, kappa: float, factor: float) -> _Series:
    nu = (s - beta) / 2
    return _Series("theta", theta_stream(alpha), 0.0, theta_stream(beta), 0.0, 1,
                   kappa, nu, nu / 2, factor, max(alpha, beta) / 4)


def _chi_series(s: complex, alpha: float, chi: RealCharacter) -> _Series:
    beta = 1.0 - alpha
    nu = (s - beta + chi.delta * (alpha - beta)) / 2
    return _Series("chi", chi_stream(alpha, chi), alpha, chi_stream(beta, chi), beta, 0,
                   2 * math.pi / chi.modulus, nu, nu / 2, 2.0, max(alpha, beta) / 4)


def _cusp_gates(f: CuspFormSpec) -> None:
    if f.weight % 4:
        raise DomainError("the cusp-form series needs weight divisible by 4")
    if not f.fricke_self_dual:
        raise DomainError("the cusp-form series needs a Fricke self-dual form")
    require_positive(f)


def _cusp_series(s: complex, alpha: float, f: CuspFormSpec) -> _Series:
    beta = 1.0 - alpha
    k = f.weight
    nu = s - k * beta
    return _Series("f", cusp_stream(alpha, f), alpha, cusp_stream(beta, f), beta, 0,
                   4 * math.pi / math.sqrt(f.level), nu, nu / 2, 2.0, k * max(alpha, beta) / 2, 400)


def make_budget(family: str, s, tol: float, alpha: float = 0.5, chi: RealCharacter | None = None,
                f: CuspFormSpec | None = None, y: float = 1.0) -> TruncationBudget:
    """Cutoff on the Bessel argument whose tail majorant is below ``tol``.

    ``family`` is ``"theta"`` (argument 2 pi y^2 sqrt(mn)), ``"chi"`` or
    ``"f"``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    s = complex(s)
    if family == "theta":
        ser = _theta_series(s, alpha, 2 * math.pi * y * y)
    elif family == "chi":
        if chi is None:
            raise DomainError("family 'chi' needs a character")
        ser = _chi_series(s, _check_alpha(alpha), chi)
    elif family == "f":
        if f is None:
            raise DomainError("family 'f' needs a cusp form")
        _cusp_gates(f)
        ser = _cusp_series(s, _check_alpha(alpha), f)
    else:
        raise DomainError(f"unknown family {family!r}")
    return _budget_for(ser, tol)


def _out(value: complex, err: float, terms: int, nodes: int, full_output: bool):
    if full_output:
        return EvalResult(complex(value), err, terms, nodes)
    return complex(value)


# ---------------------------------------------------------------- zeta


def riemann_series(s, alpha: float, tol: float | None = None, full_output: bool = False,
                   cutoff: float | None = None):
    """Completed zeta from Z_beta(s) + Z_alpha(1-s) plus the K-Bessel double sum.

    ``alpha + beta = 1``; the value does not depend on alpha.
    ``cutoff`` overrides the automatic truncation X.
    """
    tol = get_precision().series_tol if tol is None else tol
    s = complex(s)
    alpha = _check_alpha(alpha)
    zp = z_pair(s, alpha, tol=tol / 2, full_output=True)
    ser = _theta_series(s, alpha)
    res = _evaluate(ser, tol / 2, cutoff)
    return _out(zp.value + res.value, zp.abs_err + res.abs_err, res.terms, zp.nodes, full_output)


def _divisor_sum(s: complex, alpha: float, X: float, ktol: float, n_max: int | None = None,
                 kappa: float = 2 * math.pi) -> tuple[complex, int]:
    beta = 1.0 - alpha
    nu = (s - beta) / 2
    p = nu / 2
    top = int((X / kappa) ** 2) if n_max is None else n_max
    ca = theta_stream(alpha).array(max(top, 1))
    cb = theta_stream(beta).array(max(top, 1))
    re, im = [], []
    for n in range(1, top + 1):
        inner = 0j
        for d in range(1, math.isqrt(n) + 1):
            if n % d:
                continue
            e = n // d
            inner += ca[d] * cb[e] * cmath.exp(-2 * p * math.log(d))
            if e != d:
                inner += ca[e] * cb[d] * cmath.exp(-2 * p * math.log(e))
        if inner == 0:
            continue
        term = cmath.exp(p * math.log(n)) * inner * bessel_k(nu, kappa * math.sqrt(n), tol=ktol)
        re.append(term.real)
        im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im)), top


def riemann_series_divisor(s, alpha: float, tol: float | None = None, full_output: bool = False):
    """Same value as :func:`riemann_series`, summed over n = m*n' with an inner divisor sum."""
    tol = get_precision().series_tol if tol is None else tol
    s = complex(s)
    alpha = _check_alpha(alpha)
    zp = z_pair(s, alpha, tol=tol / 2, full_output=True)
    budget = _budget_for(_theta_series(s, alpha), tol / 2)
    val, top = _divisor_sum(s, alpha, budget.mn_cutoff, min(tol, 1e-13))
    return _out(zp.value + val, zp.abs_err + budget.est_tail, top, zp.nodes, full_output)


def critical_line_form(t: float, tol: float | None = None, full_output: bool = False):
    """zeta*(1/2 + it) from the cosine-paired series with c = c_{1/2}.

    Z_{1/2}(1/2+it) + Z_{1/2}(1/2-it) + sum_m c(m)^2 K_{it/2}(2 pi m)
      + 2 sum_{m<n} c(m) c(n) cos((t/4) log(n/m)) K_{it/2}(2 pi sqrt(mn)).

    The two Z terms are evaluated jointly, where their poles at t = 0
    cancel, so t = 0 needs no limiting procedure.
    """
    tol = get_precision().series_tol if tol is None else tol
    t = float(t)
    s = complex(0.5, t)
    zp = z_pair(s, 0.5, tol=tol / 2, full_output=True)
    budget = _budget_for(_theta_series(s, 0.5), tol / 2)
    X = budget.mn_cutoff
    nu = 0.5j * t
    c = theta_stream(0.5).array(int((X / (2 * math.pi)) ** 2) + 1)
    re, im = [], []
    kcache: dict = {}
    for m in range(1, c.size):
        if 2 * math.pi * m > X:
            break
        for n in range(m, c.size):
            x = 2 * math.pi * math.sqrt(m * n)
            if x > X:
                break
            w = c[m] * c[n]
            if w == 0:
                continue
            k = kcache.get(m * n)
            if k is None:
                k = kcache[m * n] = bessel_k(nu, x, tol=min(tol, 1e-13))
            if n > m:
                w *= 2 * math.cos(0.25 * t * math.log(n / m))
            term = w * k
            re.append(term.real)
            im.append(term.imag)
    val = zp.value + complex(math.fsum(re), math.fsum(im))
    return _out(val, zp.abs_err + budget.est_tail, len(re), zp.nodes, full_output)


def zeta_prefactor(t: float) -> complex:
    """pi^{1/4 + it/2} / Gamma(1/4 + it/2), converting zeta* to zeta on the critical line."""
    w = complex(0.25, 0.5 * t)
    return cmath.exp(w * math.log(math.pi)) / complex_gamma(w)


def zeta_fig_approx(t: float, n_max="auto", tol: float | None = None, full_output: bool = False):
    """Truncated expansion of zeta(1/2 + it) built from Z_{1/2} and the divisor sum.

    zeta(1/2+it) = zeta_h(1/2+it) + F(t) zeta_h(1/2-it)
                   + P(t) sum_{n <= n_max} n^{it/4} (sum_{d|n} c(d) c(n/d) d^{-it/2}) K_{it/2}(2 pi sqrt n)

    with zeta_h(s) = pi^{s/2} Gamma(s/2)^{-1} Z_{1/2}(s), P(t) the
    prefactor pi^{1/4+it/2}/Gamma(1/4+it/2), and
    F(t) = pi^{it} Gamma(1/4 - it/2) / Gamma(1/4 + it/2), a unimodular factor.
    ``n_max=0`` keeps only the two zeta_h terms; ``"auto"`` truncates where
    the tail majorant, scaled by |P(t)|, is below ``tol``.  t = 0 is
    rejected because Z_{1/2} has its pole at s = 1/2.
    """
    tol = get_precision().series_tol if tol is None else tol
    t = float(t)
    if t == 0.0:
        raise DomainError("t = 0 is excluded: Z_{1/2} has a pole at s = 1/2")
    s = complex(0.5, t)
    P = zeta_prefactor(t)
    scaled = tol / abs(P)
    zp = z_alpha(s, 0.5, tol=scaled / 4, full_output=True)
    zm = z_alpha(1 - s, 0.5, tol=scaled / 4, full_output=True)
    F = cmath.exp(1j * t * math.log(math.pi)) * complex_gamma(complex(0.25, -0.5 * t)) / complex_gamma(complex(0.25, 0.5 * t))
    zh_plus = P * zp.value
    zh_minus = zeta_prefactor(-t) * zm.value
    value = zh_plus + F * zh_minus
    err = abs(P) * (zp.abs_err + zm.abs_err)
    terms = 0
    if n_max == "auto":
        budget = _budget_for(_theta_series(s, 0.5), scaled / 2)
        sm, terms = _divisor_sum(s, 0.5, budget.mn_cutoff, 1e-15)
        err += abs(P) * budget.est_tail
        value += P * sm
    elif int(n_max) > 0:
        sm, terms = _divisor_sum(s, 0.5, 0.0, 1e-15, n_max=int(n_max))
        value += P * sm
    elif int(n_max) < 0:
        raise DomainError("n_max must be >= 0 or 'auto'")
    return _out(value, err, terms, zp.nodes + zm.nodes, full_output)


# ---------------------------------------------------------------- L-functions


def dirichlet_series(s, alpha: float, chi: RealCharacter, tol: float | None = None,
                     full_output: bool = False, cutoff: float | None = None):
    """Completed L(s, chi) as a K-Bessel double series over c_{chi,alpha}, c_{chi,beta}.

    Entire in s; requires the positivity gate for chi.
    """
    tol = get_precision().series_tol if tol is None else tol
    alpha = _check_alpha(alpha)
    require_positive(chi)
    res = _evaluate(_chi_series(complex(s), alpha, chi), tol, cutoff)
    return _out(res.value, res.abs_err, res.terms, 0, full_output)


def dirichlet_special_values(chi: RealCharacter, tol: float | None = None) -> dict:
    """{'L(1)': L(1, chi), 'L(1/2)': L(1/2, chi)} from the series at alpha = 1/2."""
    out = {}
    for key, s in (("L(1)", 1.0), ("L(1/2)", 0.5)):
        v = dirichlet_series(s, 0.5, chi, tol) / dirichlet_completion(s, chi)
        out[key] = v.real
    return out


def cuspform_series(s, alpha: float, f: CuspFormSpec, tol: float | None = None,
                    full_output: bool = False, cutoff: float | None = None):
    """Completed L(s, f) = q^{s/2} (2 pi)^{-s} Gamma(s) L(s, f) as a K-Bessel double series.

    Requires weight divisible by 4, a Fricke self-dual form, and the
    positivity gate.
    """
    tol = get_precision().series_tol if tol is None else tol
    alpha = _check_alpha(alpha)
    _cusp_gates(f)
    res = _evaluate(_cusp_series(complex(s), alpha, f), tol, cutoff)
    return _out(res.value, res.abs_err, res.terms, 0, full_output)


def cusp_edge_value(f: CuspFormSpec, tol: float | None = None) -> float:
    """L((k+1)/2, f) from the exponential double series (K of order 1/2 in closed form).

    (2 pi)^{(k+1)/2} / (q^{k/4} Gamma((k+1)/2))
      * sum_{m,n>=0} c(m) c(n) exp(-(2 pi/sqrt q) sqrt((2m+1)(2n+1))) / sqrt(2m+1)
    """
    tol = get_precision().series_tol if tol is None else tol
    _cusp_gates(f)
    k, q = f.weight, f.level
    kappa = 2 * math.pi / math.sqrt(q)
    pref = (2 * math.pi) ** ((k + 1) / 2) / (q ** (k / 4) * math.gamma((k + 1) / 2))
    ser = _cusp_series(complex((k + 1) / 2), 0.5, f)
    X = _budget_for(ser, tol / pref).mn_cutoff
    c = cusp_stream(0.5, f).array(_index_cap(ser, X))
    terms = []
    for m in range(c.size):
        for n in range(c.size):
            x = kappa * math.sqrt((2 * m + 1) * (2 * n + 1))
            if x > X:
                break
            terms.append(c[m] * c[n] * math.exp(-x) / math.sqrt(2 * m + 1))
        if kappa * math.sqrt(2 * m + 1) > X:
            break
    return pref * math.fsum(terms)


def cuspform_special_values(f: CuspFormSpec, tol: float | None = None) -> dict:
    """{'edge': L((k+1)/2, f), 'center': L(k/2, f)}."""
    k = f.weight
    center = cuspform_series(k / 2, 0.5, f, tol) / cusp_completion(k / 2, f)
    return {"edge": cusp_edge_value(f, tol), "center": center.real}
