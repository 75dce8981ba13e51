"""Coefficients of fractional powers of q-series.

For F(q) = 1 + sum a_k q^k the coefficients b_m of F(q)^alpha satisfy

    m b_m = sum_{k=1}^{m} (k (alpha + 1) - m) a_k b_{m-k},

which follows from comparing coefficients in F G' = alpha F' G.  Bases are
held sparsely so the sum only visits the nonzero a_k.

In double precision this recurrence is unstable for theta-type bases: a
rounding error at step j re-enters like the coefficients of F^{-alpha-1},
which grow like partition numbers, and c_{1/2}(m) is already wrong by
O(1) near m = 300.  The recurrence is therefore run in fixed point on
Python integers.  A second run with fewer bits measures the amplified
rounding error, and the working precision is raised until the published
values are accurate to about 2^-60 relative to max(1, |b_m|).  alpha and
the base values are binary rationals, so each step is exact apart from
one rounding.
"""

from __future__ import annotations

import contextlib
import math
import threading
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError
from .theta import CuspFormSpec, RealCharacter, require_positive

DEFAULT_DEPTH = 10_000
BRUTE_FORCE_MAX = 64
_SHADOW = 48  # bits dropped by the error-measuring shadow recurrence

# a base maps a limit L to the nonzero pairs (k, a_k) with 1 <= k <= L
Base = Callable[[int], list]


# ---------------------------------------------------------------- bases


def theta_base(limit: int) -> list:
    """theta(x) = 1 + 2 sum q^{n^2}, q = e^{-pi x}."""
    return [(n * n, 2) for n in range(1, math.isqrt(limit) + 1)]


def pentagonal_base(limit: int) -> list:
    """prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2} over all integers k."""
    out = []
    k = 1
    while k * (3 * k - 1) // 2 <= limit:
        sign = -1 if k % 2 else 1
        out.append((k * (3 * k - 1) // 2, sign))
        if k * (3 * k + 1) // 2 <= limit:
            out.append((k * (3 * k + 1) // 2, sign))
        k += 1
    return sorted(out)


def chi_base(chi: RealCharacter) -> Base:
    """theta(x, chi) / (2 e^{-pi x / q}) = 1 + sum_{n>=2} n^delta chi(n) q^{n^2 - 1}, q = e^{-pi x / q}."""

    def base(limit: int) -> list:
        out = []
        n = 2
        while n * n - 1 <= limit:
            c = chi(n)
            if c:
                out.append((n * n - 1, (n ** chi.delta) * c))
            n += 1
        return out

    return base


def cusp_base(f: CuspFormSpec) -> Base:
    """f(iy) / e^{-2 pi y} = 1 + sum_{j>=1} a_f(j+1) q^j, q = e^{-2 pi y}."""

    def base(limit: int) -> list:
        a = f.exact_coefficients(min(limit + 1, f.available))
        return [(j, a[j]) for j in range(1, len(a)) if a[j]]

    return base


def _as_base(base) -> Base:
    if callable(base):
        return base
    seq = list(base)
    if not seq or seq[0] != 1:
        raise DomainError("base series must be normalised with a_0 = 1")
    pairs = [(k, v) for k, v in enumerate(seq) if k and v]
    horizon = len(seq) - 1

    def fixed(limit: int) -> list:
        return [(k, v) for k, v in pairs if k <= limit]

    fixed.horizon = horizon
    return fixed


# ---------------------------------------------------------------- streams


class CoeffStream:
    """Append-only, lazily extended coefficients of (base series)^alpha.

    ``q_meaning`` records which variable q abbreviates and
    ``exponent_offset`` the shift of the leading exponent; both are
    descriptive only.  In exact mode (integer alpha and integer base) the
    recurrence runs on Python integers.
    """

    def __init__(self, base, alpha, exact: bool = False, q_meaning: str = "q",
                 exponent_offset: float = 0.0, max_depth: int | None = None):
        if exact:
            if int(alpha) != alpha or alpha < 0:
                raise DomainError("exact mode needs a non-negative integer alpha")
            alpha = int(alpha)
        elif not (isinstance(alpha, (int, float, np.floating)) and alpha > 0 and math.isfinite(alpha)):
            raise DomainError(f"alpha must be a positive real, got {alpha!r}")
        self.alpha = alpha if exact else float(alpha)
        self.exact = exact
        self.q_meaning = q_meaning
        self.exponent_offset = exponent_offset
        self._base = _as_base(base)
        self._horizon = getattr(self._base, "horizon", None)
        self._max_depth = max_depth
        self._lock = threading.Lock()
        self._ks = np.zeros(0, dtype=np.int64)
        self._as = np.zeros(0)
        self._pairs: list = []
        self._base_limit = -1
        if exact:
            self._vals: list = [1]
        else:
            depth = max_depth if max_depth is not None else DEFAULT_DEPTH
            a1 = Fraction(self.alpha) + 1  # exact binary rational
            self._a1_num, self._a1_den = a1.numerator, a1.denominator
            self._set_bits(128 + 4 * math.isqrt(depth + 1))
            self._base_den = 1
            self._buf = np.ones(64)
        self._n = 1  # published length
        self._overrides: dict = {}

    def __len__(self) -> int:
        return self._n

    @property
    def max_depth(self) -> int:
        return DEFAULT_DEPTH if self._max_depth is None else self._max_depth

    def _refresh_base(self, limit: int) -> None:
        if limit <= self._base_limit:
            return
        lim = max(limit, 2 * self._base_limit)
        pairs = self._base(lim)
        for k, v in pairs:
            if k == 0 or k > lim:
                raise DomainError("base generator must return pairs with 1 <= k <= limit")
        self._pairs = sorted(pairs)
        if not self.exact:
            den = 1
            for _, v in self._pairs:
                den = math.lcm(den, Fraction(v).denominator)
            if den != self._base_den and self._n > 1:
                raise DomainError("base denominators changed after the stream started")
            self._base_den = den
            self._ipairs = [(k, int(Fraction(v) * den)) for k, v in self._pairs]
        self._ks = np.array([k for k, _ in self._pairs], dtype=np.int64)
        self._as = np.array([float(v) for _, v in self._pairs])
        self._base_limit = lim

    def extend(self, n: int) -> "CoeffStream":
        """Make b_0 .. b_n available."""
        if n < self._n:
            return self
        if self._max_depth is not None and n > self._max_depth:
            raise DomainError(f"index {n} exceeds the stream depth limit {self._max_depth}")
        with self._lock:
            start = self._n
            if n < start:
                return self
            self._refresh_base(n)
            if self.exact:
                self._extend_exact(start, n)
            else:
                self._extend_float(start, n)
            self._n = n + 1  # publish only after the entries are written
        return self

    def _extend_exact(self, start: int, n: int) -> None:
        b = self._vals
        ap1 = self.alpha + 1
        pairs = self._pairs
        for m in range(start, n + 1):
            acc = 0
            for k, a in pairs:
                if k > m:
                    break
                acc += (k * ap1 - m) * a * b[m - k]
            q, r = divmod(acc, m)
            if r:
                raise DomainError("exact recurrence left a remainder; base is not integral")
            b.append(q)

    def _fixed_step(self, B: list, m: int, bits_drop: int = 0) -> int:
        num, den = self._a1_num, self._a1_den
        acc = 0
        for k, a in self._ipairs:
            if k > m:
                break
            acc += (k * num - m * den) * a * B[m - k]
        d = 2 * m * den * self._base_den
        return (2 * acc + d // 2) // d  # round to nearest

    def _extend_float(self, start: int, n: int) -> None:
        # A shadow run with _SHADOW fewer bits measures the amplified rounding
        # error; if it exceeds the target the precision is raised and the
        # stream recomputed from the start.
        if self._buf.size <= n:
            new = np.empty(max(n + 1, 2 * self._buf.size))
            new[: self._buf.size] = self._buf
            self._buf = new
        m = start
        while m <= n:
            B, S = self._fixed, self._shadow
            val = self._fixed_step(B, m)
            sval = self._fixed_step(S, m)
            one = 1 << self._bits
            err = abs(val - (sval << _SHADOW))
            scale = max(one, abs(val))
            if err > scale >> 12:
                extra = max(64, 2 * (err.bit_length() - scale.bit_length() + 12))
                self._set_bits(self._bits + extra)
                m = 1
                continue
            B.append(val)
            S.append(sval)
            self._buf[m] = val / one
            m += 1

    def _set_bits(self, bits: int) -> None:
        self._bits = bits
        self._fixed = [1 << bits]
        self._shadow = [1 << (bits - _SHADOW)]

    def __getitem__(self, m: int):
        if m < 0:
            raise IndexError("negative coefficient index")
        if m >= self._n:
            self.extend(m)
        if m in self._overrides:
            return self._overrides[m]
        return self._vals[m] if self.exact else float(self._buf[m])

    def array(self, n: int) -> np.ndarray:
        """b_0 .. b_n as a fresh float array."""
        self.extend(n)
        out = np.array(self._vals[: n + 1], dtype=float) if self.exact else self._buf[: n + 1].copy()
        for m, v in self._overrides.items():
            if m <= n:
                out[m] = v
        return out

    def growth_constant(self, power: float, m_max: int | None = None, safety: float = 10.0) -> float:
        """Empirical C with |b_m| <= C (m+1)^power on 0..m_max, times ``safety``."""
        m_max = m_max or max(self._n - 1, 400)
        b = np.abs(self.array(m_max))
        m = np.arange(b.size, dtype=float)
        return safety * float(np.max(b / (m + 1.0) ** power))


def pow_series(base, alpha, n: int, exact: bool = False, **kw) -> CoeffStream:
    """Coefficients of (sum a_m q^m)^alpha through q^n.

    ``base`` is either a sequence a_0, a_1, ... with a_0 = 1, or a callable
    returning the nonzero pairs (k, a_k) with 1 <= k <= limit.
    """
    return CoeffStream(base, alpha, exact=exact, **kw).extend(n)


# ---------------------------------------------------------------- registry

_registry: dict = {}
_registry_lock = threading.Lock()


def _stream(key, factory) -> CoeffStream:
    with _registry_lock:
        s = _registry.get(key)
        if s is None:
            s = factory()
            _registry[key] = s
    return s


def theta_stream(alpha: float) -> CoeffStream:
    """Stream for theta(x)^alpha in q = e^{-pi x}."""
    alpha = float(alpha)
    return _stream(("theta", alpha), lambda: CoeffStream(
        theta_base, alpha, q_meaning="exp(-pi x)", max_depth=DEFAULT_DEPTH))


def chi_stream(alpha: float, chi: RealCharacter) -> CoeffStream:
    """Stream for (theta(x, chi) / (2 e^{-pi x/q}))^alpha in q = e^{-pi x / q}.

    The nome decays q times slower than for theta, so the depth limit is
    scaled by the modulus.
    """
    require_positive(chi)
    alpha = float(alpha)
    return _stream(("chi", alpha, chi), lambda: CoeffStream(
        chi_base(chi), alpha, q_meaning="exp(-pi x / q)", exponent_offset=alpha,
        max_depth=DEFAULT_DEPTH * chi.modulus))


def cusp_stream(alpha: float, f: CuspFormSpec) -> CoeffStream:
    """Stream for (f(iy) / e^{-2 pi y})^alpha in q = e^{-2 pi y}."""
    require_positive(f)
    alpha = float(alpha)
    return _stream(("cusp", alpha, id(f)), lambda: CoeffStream(
        cusp_base(f), alpha, q_meaning="exp(-2 pi y)", exponent_offset=alpha,
        max_depth=f.available - 1))


def c_alpha(m: int, alpha: float) -> float:
    """Coefficient of e^{-pi m x} in theta(x)^alpha (1 at m = 0)."""
    return theta_stream(alpha)[m]


def c_chi_alpha(m: int, alpha: float, chi: RealCharacter) -> float:
    """Coefficient of e^{-pi (m + alpha) x / q} in (theta(x, chi) / 2)^alpha."""
    return chi_stream(alpha, chi)[m]


def c_f_alpha(m: int, alpha: float, f: CuspFormSpec) -> float:
    """Coefficient of e^{-2 pi (m + alpha) y} in f(iy)^alpha."""
    return cusp_stream(alpha, f)[m]


@contextlib.contextmanager
def perturbed(stream: CoeffStream, index: int, delta: float):
    """Temporarily add ``delta`` to one coefficient of a stream.

    Used for fault injection by the self-check command; the cached value
    itself is never modified.
    """
    old = stream._overrides.get(index)
    stream._overrides[index] = float(stream[index]) + delta
    try:
        yield stream
    finally:
        if old is None:
            stream._overrides.pop(index, None)
        else:
            stream._overrides[index] = old


# ---------------------------------------------------------------- oracle


def brute_force_pow_oracle(base, alpha: float, n: int) -> np.ndarray:
    """Coefficients through q^n of sum_j binom(alpha, j) u^j, u = base - 1.

    Independent of the recurrence.  The binomial expansion cancels
    massively (the coefficients of u^j are far larger than the result), so
    it is carried out in exact rational arithmetic on the binary values of
    alpha and the base; only the final result is rounded.  Cost is cubic,
    so ``n`` is capped.
    """
    if n > BRUTE_FORCE_MAX:
        raise DomainError(f"brute-force oracle is limited to n <= {BRUTE_FORCE_MAX}")
    u = [Fraction(0)] * (n + 1)
    if callable(base):
        for k, a in base(n):
            if 1 <= k <= n:
                u[k] = Fraction(a)
    else:
        seq = list(base)
        if seq[0] != 1:
            raise DomainError("base series must be normalised with a_0 = 1")
        for k in range(1, min(len(seq), n + 1)):
            u[k] = Fraction(seq[k])
    a = Fraction(float(alpha))
    out = [Fraction(0)] * (n + 1)
    out[0] = Fraction(1)
    power = [Fraction(1)] + [Fraction(0)] * n
    binom = Fraction(1)
    nz = [k for k in range(1, n + 1) if u[k]]
    for j in range(1, n + 1):
        nxt = [Fraction(0)] * (n + 1)
        for i, p in enumerate(power):
            if p:
                for k in nz:
                    if i + k > n:
                        break
                    nxt[i + k] += p * u[k]
        power = nxt
        if not any(power):
            break
        binom = binom * (a - (j - 1)) / j
        for i in range(n + 1):
            out[i] += binom * power[i]
    return np.array([float(v) for v in out])


def convolve_streams(a: Sequence[float], b: Sequence[float], n: int) -> np.ndarray:
    """Cauchy product of two coefficient tables truncated at index n."""
    return np.convolve(np.asarray(a[: n + 1], float), np.asarray(b[: n + 1], float))[: n + 1]


def iter_nonzero(stream: CoeffStream, n: int) -> Iterable[tuple[int, float]]:
    arr = stream.array(n)
    idx = np.nonzero(arr)[0]
    return zip(idx.tolist(), arr[idx].tolist())
