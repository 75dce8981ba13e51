"""Theta-type series: theta(x), theta(x, chi) and cusp forms on the imaginary axis.

All three objects are evaluated by direct summation on the side of the
modular transformation where the nome is small, and reflected otherwise.
Besides plain values, log-scaled forms are provided because the fractional
powers downstream are taken as exp(alpha * log(...)) of quantities that
underflow for large arguments.
"""

from __future__ import annotations

import cmath
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .config import get_precision
from .errors import ConvergenceError, DomainError, GateError

_LOG_TINY = 42.0  # exp(-42) ~ 6e-19 relative cutoff for direct sums


# ---------------------------------------------------------------- theta(x)


def _theta_terms(xmin: float) -> int:
    return int(math.sqrt(_LOG_TINY / (math.pi * xmin))) + 2


def theta0_minus_one(x):
    """theta(x) - 1 = 2 sum_{n>=1} exp(-pi n^2 x), summed directly.

    Accepts real or complex scalars/arrays; intended for Re(x) >= 1/2 or so,
    where the sum needs only a handful of terms.
    """
    x = np.asarray(x)
    re = float(np.min(np.real(x))) if x.size else 1.0
    if re <= 0:
        raise DomainError("direct theta summation needs Re(x) > 0")
    acc = np.zeros_like(x, dtype=np.result_type(x, float))
    for n in range(_theta_terms(re), 0, -1):
        acc = acc + np.exp(-math.pi * n * n * x)
    return 2.0 * acc


def theta0(x: float) -> float:
    """Jacobi theta(x) = sum over all integers n of exp(-pi n^2 x), x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"theta0 needs x > 0, got {x}")
    if x >= 1.0:
        return 1.0 + float(theta0_minus_one(x))
    return (1.0 + float(theta0_minus_one(1.0 / x))) / math.sqrt(x)


def theta0_array(x: np.ndarray) -> np.ndarray:
    """Vectorised ``theta0`` for positive real arrays."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("theta0 needs x > 0")
    big = np.maximum(x, 1.0 / x)
    val = 1.0 + theta0_minus_one(big)
    return np.where(x >= 1.0, val, val / np.sqrt(x))


# ---------------------------------------------------------------- characters


@dataclass(frozen=True)
class RealCharacter:
    """A real primitive Dirichlet character given by its period table.

    ``values[n]`` is chi(n) for 0 <= n < modulus.  All invariants
    (zero pattern, complete multiplicativity, primitivity, Gauss sum) are
    checked on construction.
    """

    modulus: int
    values: tuple
    name: str = ""
    delta: int = field(init=False)

    def __post_init__(self):
        q = int(self.modulus)
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if q < 2:
            raise DomainError("modulus must be >= 2 (the trivial character is not handled here)")
        if len(vals) != q:
            raise DomainError(f"expected {q} values, got {len(vals)}")
        if any(v not in (-1, 0, 1) for v in vals):
            raise DomainError("character values must be -1, 0 or +1")
        for n, v in enumerate(vals):
            if (v == 0) != (math.gcd(n, q) > 1):
                raise DomainError(f"chi({n}) must vanish exactly when gcd({n}, {q}) > 1")
        for a in range(q):
            for b in range(a, q):
                if vals[a * b % q] != vals[a] * vals[b]:
                    raise DomainError(f"not multiplicative: chi({a}*{b}) != chi({a}) chi({b})")
        for d in range(1, q):
            if q % d:
                continue
            # induced from modulus d iff constant on unit classes mod d
            induced = all(vals[a] == vals[b] for a in range(q) for b in range(a, q)
                          if vals[a] and vals[b] and (a - b) % d == 0)
            if induced:
                raise DomainError(f"character mod {q} is induced from modulus {d}; not primitive")
        delta = 0 if vals[q - 1] == 1 else 1
        object.__setattr__(self, "delta", delta)
        gauss = sum(v * cmath.exp(2j * math.pi * a / q) for a, v in enumerate(vals))
        expected = (1j ** delta) * math.sqrt(q)
        if abs(gauss - expected) > 1e-12:
            raise DomainError(f"Gauss sum {gauss} != i^delta sqrt(q) = {expected}")

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]

    @classmethod
    def from_dict(cls, data: dict) -> "RealCharacter":
        chi = cls(int(data["q"]), tuple(data["values"]), data.get("name", ""))
        if "delta" in data and int(data["delta"]) != chi.delta:
            raise DomainError(f"declared delta {data['delta']} disagrees with chi(-1)")
        return chi

    @classmethod
    def from_json(cls, path) -> "RealCharacter":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {"q": self.modulus, "values": list(self.values), "delta": self.delta, "name": self.name}


_BUNDLED = {
    "-3": (3, (0, 1, -1)),
    "-4": (4, (0, 1, 0, -1)),
    "5": (5, (0, 1, -1, -1, 1)),
    "8": (8, (0, 1, 0, -1, 0, -1, 0, 1)),
    "-8": (8, (0, 1, 0, 1, 0, -1, 0, -1)),
}


def bundled_character(label) -> RealCharacter:
    """One of the bundled real primitive characters, by discriminant label.

    Labels are ``-3, -4, 5, 8, -8`` (moduli 3, 4, 5, 8, 8).
    """
    key = str(label)
    if key not in _BUNDLED:
        raise KeyError(f"no bundled character {label!r}; choose from {sorted(_BUNDLED)}")
    q, vals = _BUNDLED[key]
    return RealCharacter(q, vals, name=f"chi{key}")


def _kronecker(d: int, n: int) -> int:
    # Kronecker symbol (d/n) for n >= 1
    out = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            out = -out
    a = d % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                out = -out
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            out = -out
        a %= n
    return out if n == 1 else 0


def kronecker_character(disc: int) -> RealCharacter:
    """The quadratic character n -> (disc/n) of a fundamental discriminant.

    Its modulus is |disc|; non-fundamental discriminants fail the
    primitivity check.
    """
    disc = int(disc)
    q = abs(disc)
    if q < 3:
        raise DomainError("discriminant must have |disc| >= 3")
    return RealCharacter(q, tuple(_kronecker(disc, n) if n else 0 for n in range(q)), name=f"chi{disc}")


def _chi_tail(x, chi: RealCharacter):
    # sum_{n>=2} n^delta chi(n) exp(-pi (n^2-1) x / q), for x >= 1
    x = np.asarray(x, dtype=float)
    q, d = chi.modulus, chi.delta
    nmax = int(math.sqrt(_LOG_TINY * q / (math.pi * max(float(np.min(x)), 1e-300)) + 1)) + 2
    acc = np.zeros_like(x)
    for n in range(nmax, 1, -1):
        c = chi(n)
        if c:
            acc = acc + (n ** d) * c * np.exp(-math.pi * (n * n - 1) * x / q)
    return acc


def log_theta_chi(x, chi: RealCharacter):
    """log theta(x, chi) for positive theta; raises GateError if not positive."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("theta_chi needs x > 0")
    big = np.maximum(x, 1.0 / x)
    inner = 1.0 + _chi_tail(big, chi)
    if np.any(inner <= 0):
        raise GateError(f"theta(x, {chi.name or chi.modulus}) is not positive on the requested points")
    lv = math.log(2.0) - math.pi * big / chi.modulus + np.log(inner)
    return np.where(x >= 1.0, lv, lv - (0.5 + chi.delta) * np.log(x))


def theta_chi(x: float, chi: RealCharacter) -> float:
    """theta(x, chi) = sum over integers n of n^delta chi(n) exp(-pi n^2 x / q).

    For x < 1 the reflection theta(x, chi) = x^{-1/2-delta} theta(1/x, chi)
    is used.
    """
    x = float(x)
    if not x > 0:
        raise DomainError(f"theta_chi needs x > 0, got {x}")
    big = max(x, 1.0 / x)
    val = 2.0 * math.exp(-math.pi * big / chi.modulus) * (1.0 + float(_chi_tail(big, chi)))
    if x >= 1.0:
        return val
    return val * x ** (-(0.5 + chi.delta))


# ---------------------------------------------------------------- cusp forms

_delta_lock = threading.Lock()
_delta_cache: list[int] = [1]  # tau(1..)
DELTA_DEFAULT_DEPTH = 10_000


def delta_coeffs(N: int) -> tuple[int, ...]:
    """Ramanujan tau(1..N) as exact integers.

    Delta = q prod (1 - q^n)^24; the Euler product is the sparse pentagonal
    series, raised to the 24th power with the exact integer recurrence.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    from .powcoeffs import pentagonal_base, pow_series

    with _delta_lock:
        if len(_delta_cache) < N:
            stream = pow_series(pentagonal_base, 24, N - 1, exact=True)
            _delta_cache[:] = [int(stream[m]) for m in range(N)]
        return tuple(_delta_cache[:N])


@dataclass(frozen=True, eq=False)
class CuspFormSpec:
    """A holomorphic cusp form given by its Fourier coefficients a(1), a(2), ...

    ``coeffs`` may be empty when ``builtin == "delta"``; coefficients are
    then generated on demand.  Forms compare and hash by identity.
    """

    weight: int
    level: int = 1
    coeffs: tuple = ()
    fricke_self_dual: bool = False
    builtin: str | None = None
    name: str = ""
    growth_constant: float = 2.0

    def __post_init__(self):
        if self.weight < 1 or self.weight % 4:
            raise DomainError("weight must be a positive multiple of 4")
        if self.level < 1:
            raise DomainError("level must be a positive integer")
        if self.builtin not in (None, "delta"):
            raise DomainError(f"unknown builtin form {self.builtin!r}")
        if self.builtin is None and not self.coeffs:
            raise DomainError("explicit coefficients required")
        a = self.coefficients(min(self.available, 2000))
        if a[0] != 1:
            raise DomainError("a_f(1) must equal 1")
        n = np.arange(1, a.size + 1, dtype=float)
        bound = self.growth_constant * n ** (self.weight / 2)
        if np.any(np.abs(a) > bound):
            bad = int(np.argmax(np.abs(a) > bound)) + 1
            raise DomainError(f"coefficient a({bad}) violates |a(n)| <= C n^(k/2)")

    @property
    def available(self) -> int:
        return DELTA_DEFAULT_DEPTH if self.builtin == "delta" else len(self.coeffs)

    def coefficients(self, n: int) -> np.ndarray:
        """a(1..n) as a float array."""
        if n > self.available:
            raise ConvergenceError(f"need {n} coefficients, only {self.available} available")
        if self.builtin == "delta":
            return np.array(delta_coeffs(n), dtype=float)
        return np.array(self.coeffs[:n], dtype=float)

    def exact_coefficients(self, n: int) -> tuple:
        if self.builtin == "delta":
            return delta_coeffs(n)
        return tuple(self.coeffs[:n])

    @classmethod
    def from_dict(cls, data: dict) -> "CuspFormSpec":
        if data.get("builtin") == "delta":
            return delta_form()
        return cls(int(data["k"]), int(data.get("q", 1)), tuple(data["coeffs"]),
                   bool(data.get("fricke_self_dual", False)), None, data.get("name", ""))

    @classmethod
    def from_json(cls, path) -> "CuspFormSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


_delta_form = None


def delta_form() -> CuspFormSpec:
    """The discriminant form Delta (weight 12, level 1, self-dual)."""
    global _delta_form
    if _delta_form is None:
        _delta_form = CuspFormSpec(12, 1, (), True, "delta", "Delta")
    return _delta_form


def _cusp_terms(y: float, f: CuspFormSpec, tol: float) -> int:
    # tail bound relative to the leading term exp(-2 pi y):
    # C N^{k/2} exp(-2 pi (N-1) y) / (1 - exp(-2 pi y)) < tol
    k, C = f.weight, f.growth_constant
    damp = 1.0 - math.exp(-2 * math.pi * y)
    N = 2
    while C * N ** (k / 2) * math.exp(-2 * math.pi * (N - 1) * y) / damp >= tol:
        N += 1
        if N > f.available:
            raise ConvergenceError(f"tail bound for y={y} needs more than {f.available} coefficients")
    return N


def _cusp_inner(y, f: CuspFormSpec, n_terms: int):
    # 1 + sum_{n=2}^{N} a(n) exp(-2 pi (n-1) y)
    y = np.asarray(y, dtype=float)
    a = f.coefficients(n_terms)
    acc = np.zeros_like(y)
    for n in range(n_terms, 1, -1):
        acc = acc + a[n - 1] * np.exp(-2 * math.pi * (n - 1) * y)
    return 1.0 + acc


def _reflect(y: float, f: CuspFormSpec) -> bool:
    return f.fricke_self_dual and y * math.sqrt(f.level) < 1.0


def log_cusp(y, f: CuspFormSpec, tol: float | None = None):
    """log f(iy) for positive f(iy); uses the Fricke reflection for small y."""
    if tol is None:
        tol = get_precision().tol
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("eval_cusp needs y > 0")
    k, q = f.weight, f.level
    refl = f.fricke_self_dual & (y * math.sqrt(q) < 1.0)
    yy = np.where(refl, 1.0 / (q * y), y)
    n_terms = _cusp_terms(float(np.min(yy)), f, tol * 1e-3)
    inner = _cusp_inner(yy, f, n_terms)
    if np.any(inner <= 0):
        raise GateError(f"f(iy) is not positive for {f.name or 'the form'}")
    lv = -2 * math.pi * yy + np.log(inner)
    # f(iy) = q^{-k/2} y^{-k} f(i/(q y)) when Wf = f and k = 0 mod 4
    return np.where(refl, lv - 0.5 * k * math.log(q) - k * np.log(y), lv)


def eval_cusp(y: float, f: CuspFormSpec, n_terms: int | None = None, tol: float | None = None,
              full_output: bool = False):
    """f(iy) = sum_{n>=1} a(n) exp(-2 pi n y).

    With ``n_terms=None`` the truncation is chosen so that the tail bound
    C N^{k/2} e^{-2 pi N y} / (1 - e^{-2 pi y}) is below ``tol`` times the
    leading term.  Self-dual forms are reflected to y >= 1/sqrt(q) first.
    """
    from .special_fn import EvalResult

    if tol is None:
        tol = get_precision().tol
    y = float(y)
    if not y > 0:
        raise DomainError(f"eval_cusp needs y > 0, got {y}")
    k, q = f.weight, f.level
    yy = 1.0 / (q * y) if _reflect(y, f) else y
    auto = n_terms is None
    if auto:
        n_terms = _cusp_terms(yy, f, tol)
    elif n_terms > f.available:
        raise ConvergenceError(f"only {f.available} coefficients available")
    lead = math.exp(-2 * math.pi * yy)
    val = lead * float(_cusp_inner(yy, f, max(n_terms, 1)))
    damp = 1.0 - math.exp(-2 * math.pi * yy)
    err = f.growth_constant * (n_terms + 1) ** (k / 2) * math.exp(-2 * math.pi * (n_terms + 1) * yy) / damp
    if yy != y:
        scale = q ** (-k / 2) * y ** (-k)
        val *= scale
        err *= scale
    if full_output:
        return EvalResult(val, err, n_terms, 0)
    return val


# ---------------------------------------------------------------- positivity


@dataclass(frozen=True)
class PositivityReport:
    target: str
    min_value: float
    argmin: float
    positive: bool
    grid_size: int
    heuristic: bool = True  # a grid check, not a proof


def default_grid(n: int = 601, lo: float = 1e-3, hi: float = 1e3) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _normalized(target, x: np.ndarray) -> np.ndarray:
    # value divided by its (positive) leading asymptotic term, on x >= 1
    if isinstance(target, RealCharacter):
        return 1.0 + _chi_tail(x, target)
    y = x / math.sqrt(target.level)
    n_terms = _cusp_terms(float(np.min(y)), target, 1e-16)
    return _cusp_inner(y, target, n_terms)


_positivity_cache: dict = {}
_positivity_lock = threading.Lock()


def check_positivity(target, grid: np.ndarray | None = None, raise_on_failure: bool = True) -> PositivityReport:
    """Grid check that theta(x, chi) > 0 (or f(iy) > 0) for all x > 0.

    The functional equation maps x < 1 onto x > 1 with a positive factor,
    so the grid is folded onto [1, x_max].  Each function is divided by its
    positive leading term before comparing, which keeps the check
    meaningful where the raw value underflows.  The minimum over the grid
    is refined by a bounded scalar minimisation between its neighbours.
    """
    if grid is None:
        grid = default_grid()
    grid = np.asarray(grid, dtype=float)
    if isinstance(target, CuspFormSpec) and not target.fricke_self_dual:
        folded = grid
    else:
        folded = np.unique(np.maximum(grid, 1.0 / grid))
    vals = _normalized(target, folded)
    i = int(np.argmin(vals))
    lo = folded[max(i - 1, 0)]
    hi = folded[min(i + 1, folded.size - 1)]
    best_x, best = float(folded[i]), float(vals[i])
    if hi > lo:
        res = minimize_scalar(lambda t: float(_normalized(target, np.array([t]))[0]),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        if res.fun < best:
            best_x, best = float(res.x), float(res.fun)
    label = target.name or (f"chi mod {target.modulus}" if isinstance(target, RealCharacter) else "form")
    report = PositivityReport(label, best, best_x, best > 0, grid.size)
    if not report.positive and raise_on_failure:
        raise GateError(f"{label} is not positive: normalised value {best:.3e} at x = {best_x:.6g}")
    return report


def require_positive(target) -> PositivityReport:
    """Cached positivity gate used before fractional powers are formed."""
    key = id(target) if isinstance(target, CuspFormSpec) else target
    with _positivity_lock:
        hit = _positivity_cache.get(key)
    if hit is None:
        hit = check_positivity(target, raise_on_failure=False)
        with _positivity_lock:
            _positivity_cache[key] = hit
    if not hit.positive:
        raise GateError(f"{hit.target} failed the positivity check "
                        f"(normalised value {hit.min_value:.3e} at x = {hit.argmin:.6g})")
    return hit
