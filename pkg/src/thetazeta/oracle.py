"""Reference values for validation, built without theta series or K-Bessel sums.

zeta and Hurwitz zeta use Euler-Maclaurin summation; Dirichlet L-values
are assembled from Hurwitz values.  Cusp-form L* values come from the
reflected Mellin integral at exponent one, integrated with adaptive
QUADPACK rather than the package's own Gauss-Legendre panels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, PoleError
from .special_fn import complex_gamma, log_gamma
from .theta import CuspFormSpec, RealCharacter

# B_2 .. B_30
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330), Fraction(854513, 138), Fraction(-236364091, 2730),
    Fraction(8553103, 6), Fraction(-23749461029, 870), Fraction(8615841276005, 14322),
]
# B_{2k} / (2k)!
_EM_COEFFS = [float(b / math.factorial(2 * k)) for k, b in enumerate(_BERNOULLI, start=1)]


@dataclass(frozen=True)
class EMConfig:
    """Euler-Maclaurin resolution: N direct terms, M Bernoulli corrections."""

    direct_terms: int
    bernoulli_order: int = 13

    def __post_init__(self):
        if self.direct_terms < 1 or not 1 <= self.bernoulli_order <= len(_BERNOULLI):
            raise DomainError("need N >= 1 and 1 <= M <= 15")

    @classmethod
    def default(cls, s: complex, a: float = 1.0, tol: float = 1e-17) -> "EMConfig":
        """Smallest N whose remainder bound |B_2M/(2M)!| |(s)_2M| X^{-Re s - 2M + 1} is below tol."""
        s = complex(s)
        M = 13
        log_rise = sum(math.log(abs(s + j)) for j in range(2 * M) if s + j != 0)
        log_b = math.log(abs(_EM_COEFFS[M - 1]))
        N = 10
        while log_b + log_rise + (-s.real - 2 * M + 1) * math.log(N + a) > math.log(tol):
            N += 5
        return cls(N, M)


def _check_strip(s: complex) -> None:
    if s.real <= -5 or abs(s.imag) > 100:
        raise DomainError(f"s = {s} outside the supported strip Re(s) > -5, |Im(s)| <= 100")


def _expm1_c(z: complex) -> complex:
    if abs(z) < 1e-3:
        return z * (1 + z / 2 * (1 + z / 3 * (1 + z / 4 * (1 + z / 5 * (1 + z / 6)))))
    return cmath.exp(z) - 1


def _em_parts(s: complex, a: float, cfg: EMConfig):
    """Direct sum, the (N+a)^{1-s} coefficient, and the Bernoulli tail."""
    N, M = cfg.direct_terms, cfg.bernoulli_order
    n = np.arange(N, dtype=float) + a
    direct = complex(np.sum(np.exp(-s * np.log(n))))
    X = N + a
    logX = math.log(X)
    tail = cmath.exp(-s * logX) / 2
    rising = s  # (s)_{2k-1}
    for k in range(1, M + 1):
        tail += _EM_COEFFS[k - 1] * rising * cmath.exp(-(s + 2 * k - 1) * logX)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return direct, logX, tail


def _hurwitz_direct(s: complex, a: float, cfg: EMConfig | None) -> complex:
    cfg = cfg or EMConfig.default(s, a)
    direct, logX, tail = _em_parts(s, a, cfg)
    return direct + cmath.exp((1 - s) * logX) / (s - 1) + tail


def _rational(a: float, max_den: int = 1000) -> Fraction | None:
    r = Fraction(a).limit_denominator(max_den)
    return r if abs(float(r) - a) <= 1e-15 * a else None


def hurwitz_zeta(s, a: float, cfg: EMConfig | None = None) -> complex:
    """Hurwitz zeta(s, a) = sum_{n>=0} (n + a)^{-s}, 0 < a <= 1.

    For Re s < 0 and rational a = p/q the value is reflected to 1 - s,
    zeta(s, p/q) = 2 Gamma(1-s) (2 pi q)^{s-1}
                   sum_k sin(pi s/2 + 2 pi k p/q) zeta(1-s, k/q),
    because the direct sum loses digits to terms of size N^{-Re s}.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    if not 0 < a <= 1:
        raise DomainError("a must lie in (0, 1]")
    _check_strip(s)
    r = _rational(a) if s.real < 0 else None
    if r is None:
        return _hurwitz_direct(s, a, cfg)
    p, q = r.numerator, r.denominator
    w = 1 - s
    total = 0j
    for k in range(1, q + 1):
        total += cmath.sin(math.pi * s / 2 + 2 * math.pi * k * p / q) * _hurwitz_direct(w, k / q, cfg)
    return 2 * complex_gamma(w) * cmath.exp(-w * math.log(2 * math.pi * q)) * total


def zeta_em(s, cfg: EMConfig | None = None) -> complex:
    """Riemann zeta by Euler-Maclaurin summation, reflected for Re s < 0."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    _check_strip(s)
    if s.real >= 0:
        return _hurwitz_direct(s, 1.0, cfg)
    w = 1 - s
    chi = (cmath.exp(s * math.log(2 * math.pi)) / math.pi * cmath.sin(math.pi * s / 2) * complex_gamma(w))
    return chi * _hurwitz_direct(w, 1.0, cfg)


def zeta_star_oracle(s, cfg: EMConfig | None = None) -> complex:
    """pi^{-s/2} Gamma(s/2) zeta(s) from Euler-Maclaurin and the gamma function."""
    s = complex(s)
    return cmath.exp(-s / 2 * math.log(math.pi)) * complex_gamma(s / 2) * zeta_em(s, cfg)


def dirichlet_l_oracle(s, chi: RealCharacter, cfg: EMConfig | None = None) -> complex:
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q).

    The individual Hurwitz poles cancel because sum chi(a) = 0; the pole
    terms are rewritten as expm1((1-s) log X)/(s-1) so s near 1 (and s = 1
    itself) is evaluated without cancellation.
    """
    s = complex(s)
    _check_strip(s)
    q = chi.modulus
    if s.real < 0:
        # reflected Hurwitz values; no pole terms to cancel here
        total = sum(chi(r) * hurwitz_zeta(s, r / q, cfg) for r in range(1, q) if chi(r))
        return cmath.exp(-s * math.log(q)) * total
    total = 0j
    for r in range(1, q):
        c = chi(r)
        if not c:
            continue
        direct, logX, tail = _em_parts(s, r / q, cfg or EMConfig.default(s, r / q))
        if s == 1:
            pole = -logX
        else:
            pole = _expm1_c((1 - s) * logX) / (s - 1)
        total += c * (direct + pole + tail)
    return cmath.exp(-s * math.log(q)) * total


def dirichlet_completion(s, chi: RealCharacter) -> complex:
    """(q/pi)^{(s+delta)/2} Gamma((s+delta)/2)."""
    w = (complex(s) + chi.delta) / 2
    return cmath.exp(w * math.log(chi.modulus / math.pi)) * complex_gamma(w)


def cusp_completion(s, f: CuspFormSpec) -> complex:
    """q^{s/2} (2 pi)^{-s} Gamma(s)."""
    s = complex(s)
    return cmath.exp(s / 2 * math.log(f.level) - s * math.log(2 * math.pi)) * complex_gamma(s)


def _cusp_direct(y: float, a: np.ndarray) -> float:
    n = np.arange(1, a.size + 1)
    return float(np.dot(a, np.exp(-2 * math.pi * n * y)))


def cuspform_l_oracle(s, f: CuspFormSpec, tol: float = 1e-13) -> complex:
    """L*(s, f) = int_1^inf f(iy/sqrt(q)) (y^s + y^{k-s}) dy/y for self-dual f."""
    if not f.fricke_self_dual:
        raise DomainError("the reflected integral needs a Fricke self-dual form")
    s = complex(s)
    k, sq = f.weight, math.sqrt(f.level)
    sigma = max(s.real, k - s.real, 1.0)
    # f(iy/sqrt q) <= 2 e^{-2 pi y / sqrt q}; stop where that times y^sigma is negligible
    T = 2.0
    while -2 * math.pi * T / sq + sigma * math.log(T) > math.log(tol) - 10:
        T *= 1.1
    n_coef = min(f.available, int(sq * 40 / (2 * math.pi)) + 40)
    a = f.coefficients(n_coef)

    def g(y):
        return _cusp_direct(y / sq, a) / y

    def re(y):
        return g(y) * ((y ** s).real + (y ** (k - s)).real)

    def im(y):
        return g(y) * ((y ** s).imag + (y ** (k - s)).imag)

    opts = dict(limit=400, epsabs=tol * 1e-3, epsrel=tol)
    vr = quad(re, 1.0, T, **opts)[0]
    vi = quad(im, 1.0, T, **opts)[0] if s.imag else 0.0
    return complex(vr, vi)


# ---------------------------------------------------------------- zeros


def hardy_z(t: float) -> float:
    """Real-valued e^{i vartheta(t)} zeta(1/2 + it)."""
    theta = log_gamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)
    return (cmath.exp(1j * theta) * zeta_em(0.5 + 1j * t)).real


def zeta_zeros(t_min: float, t_max: float, step: float = 0.02) -> list[float]:
    """Ordinates of zeros of zeta(1/2+it) in [t_min, t_max] located by sign changes."""
    ts = np.arange(t_min, t_max + step / 2, step)
    vals = [hardy_z(t) for t in ts]
    out = []
    for i in range(len(ts) - 1):
        if vals[i] == 0:
            out.append(float(ts[i]))
        elif vals[i] * vals[i + 1] < 0:
            out.append(brentq(hardy_z, ts[i], ts[i + 1], xtol=1e-12))
    return out
