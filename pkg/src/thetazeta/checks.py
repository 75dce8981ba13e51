"""Invariant suites run by ``thetazeta check``.

Each check draws its random points from a generator seeded per check
(``seed`` combined with the check name), so the report is byte-identical
for a fixed seed regardless of which subset of checks runs.  A check
returns its worst residual and the bound it is held to.
"""

from __future__ import annotations

import cmath
import contextlib
import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import csformula, eisenstein, oracle, powcoeffs, special_fn, theta, zalpha
from .config import get_precision


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    bound: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.bound)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{tag}  {self.name:<34} residual={self.residual:.3e}  bound={self.bound:.1e}{extra}"


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable[[np.random.Generator, bool], tuple]
    fast: bool = True


_REGISTRY: list[Check] = []


def check(name: str, fast: bool = True):
    def deco(fn):
        _REGISTRY.append(Check(name, fn, fast))
        return fn
    return deco


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _points(rng, n, re, im, poles=(), gap=0.05) -> list[complex]:
    out = []
    while len(out) < n:
        s = complex(rng.uniform(*re), rng.uniform(*im))
        if all(abs(s - p) > gap for p in poles):
            out.append(s)
    return out


def _worst(pairs) -> float:
    return max(abs(complex(a) - complex(b)) for a, b in pairs)


# ---------------------------------------------------------------- special_fn


@check("special_fn.k_symmetry")
def _k_symmetry(rng, full):
    nus = [complex(rng.uniform(-8, 8), rng.uniform(-15, 15)) for _ in range(6 if full else 3)]
    worst = 0.0
    for nu in nus:
        for x in (0.5, 1, 2, 5, 10):
            worst = max(worst, abs(special_fn.bessel_k(nu, x) - special_fn.bessel_k(-nu, x)))
    return worst, 1e-12


@check("special_fn.k_recurrence")
def _k_recurrence(rng, full):
    worst = 0.0
    for nu in (0, 0.25, 1, 2 + 3j, 5j):
        for x in (1, 2, 5):
            km, k0, kp = (special_fn.bessel_k(nu + d, x) for d in (-1, 0, 1))
            worst = max(worst, abs(kp - km - 2 * nu / x * k0) / max(1.0, abs(km)))
    return worst, 1e-10


@check("special_fn.k_half_closed_form")
def _k_half(rng, full):
    worst = max(abs(special_fn.bessel_k(0.5, x) - math.sqrt(math.pi / (2 * x)) * math.exp(-x))
                for x in (0.1, 1, 10, 30))
    return worst, 1e-13


@check("special_fn.k_conjugation")
def _k_conj(rng, full):
    worst = 0.0
    for _ in range(8 if full else 4):
        nu = complex(rng.uniform(-10, 10), rng.uniform(-20, 20))
        x = rng.uniform(0.2, 20)
        worst = max(worst, abs(special_fn.bessel_k(nu.conjugate(), x) - special_fn.bessel_k(nu, x).conjugate()))
    return worst, 1e-12


@check("special_fn.k_imaginary_order_real")
def _k_imag(rng, full):
    worst = max(abs(special_fn.bessel_k(1j * tau, x).imag) for tau in (1, 5, 20) for x in (1, 5))
    return worst, 1e-12


@check("special_fn.gamma_reflection")
def _gamma_reflection(rng, full):
    worst = 0.0
    for _ in range(40 if full else 20):
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20)) / math.sqrt(2)
        ref = math.pi / cmath.sin(math.pi * z)
        lhs = special_fn.complex_gamma(z) * special_fn.complex_gamma(1 - z)
        worst = max(worst, abs(lhs - ref) / abs(ref))
    return worst, 1e-10


# ---------------------------------------------------------------- theta

_GRID = (0.1, 0.5, 1, 2, 10)
_CHARS = ("-3", "-4", "5", "8", "-8")


@check("theta.functional_equation")
def _theta_fe(rng, full):
    worst = max(abs(theta.theta0(1 / x) - math.sqrt(x) * theta.theta0(x)) / theta.theta0(x) for x in _GRID)
    return worst, 1e-12


@check("theta.chi_functional_equation")
def _chi_fe(rng, full):
    worst = 0.0
    for label in _CHARS:
        chi = theta.bundled_character(label)
        for x in _GRID:
            lhs = theta.theta_chi(1 / x, chi)
            rhs = x ** (0.5 + chi.delta) * theta.theta_chi(x, chi)
            worst = max(worst, abs(lhs - rhs))
    return worst, 1e-12


@check("theta.fricke_delta")
def _fricke(rng, full):
    f = theta.delta_form()
    worst = 0.0
    for y in (0.5, 1, 2):
        rhs = y ** 12 * theta.eval_cusp(y, f)
        worst = max(worst, abs(theta.eval_cusp(1 / y, f) - rhs) / abs(rhs))
    return worst, 1e-12


@check("theta.truncation_soundness")
def _truncation(rng, full):
    f = theta.delta_form()
    ratio = 0.0
    for y in (0.3, 0.8, 1.0, 1.7):
        r = theta.eval_cusp(y, f, full_output=True)
        doubled = theta.eval_cusp(y, f, n_terms=2 * max(r.terms, 1))
        floor = 4 * np.finfo(float).eps * abs(doubled)
        ratio = max(ratio, abs(doubled - r.value) / (r.abs_err + floor))
    return ratio, 1.0


# ---------------------------------------------------------------- powcoeffs


def _conv_residual(ca, cb, cab, m):
    return float(np.max(np.abs(powcoeffs.convolve_streams(ca, cb, m) - cab[: m + 1])))


@check("powcoeffs.convolution_law")
def _convolution(rng, full):
    m = 200
    worst = 0.0
    for a, b in ((0.5, 0.5), (0.3, 0.7), (1.0, 1.0)):
        ts = powcoeffs.theta_stream
        worst = max(worst, _conv_residual(ts(a).array(m), ts(b).array(m), ts(a + b).array(m), m))
    chi = theta.bundled_character("-4")
    cs = powcoeffs.chi_stream
    worst = max(worst, _conv_residual(cs(0.5, chi).array(m), cs(0.5, chi).array(m), cs(1.0, chi).array(m), m))
    f = theta.delta_form()
    fs = powcoeffs.cusp_stream
    worst = max(worst, _conv_residual(fs(0.25, f).array(m), fs(0.75, f).array(m), fs(1.0, f).array(m), m))
    return worst, 1e-10


@check("powcoeffs.oracle_equivalence")
def _oracle_equiv(rng, full):
    n = powcoeffs.BRUTE_FORCE_MAX
    chi = theta.bundled_character("8")
    f = theta.delta_form()
    bases = (powcoeffs.theta_base, powcoeffs.pentagonal_base, powcoeffs.chi_base(chi), powcoeffs.cusp_base(f))
    worst = 0.0
    for base in bases:
        for a in (0.5, 0.3, 1.7):
            fast = powcoeffs.pow_series(base, a, n).array(n)
            slow = powcoeffs.brute_force_pow_oracle(base, a, n)
            worst = max(worst, float(np.max(np.abs(fast - slow) / np.maximum(1.0, np.abs(slow)))))
    return worst, 1e-10


@check("powcoeffs.partial_sum")
def _partial_sum(rng, full):
    c = powcoeffs.theta_stream(0.5).array(200)
    m = np.arange(c.size)
    approx = math.fsum((c * np.exp(-math.pi * m)).tolist())
    return abs(approx - math.sqrt(theta.theta0(1.0))), 1e-10


@check("powcoeffs.growth_sanity")
def _growth(rng, full):
    c = powcoeffs.theta_stream(0.5).array(2000)[1:]
    m = np.arange(1, c.size + 1)
    ratio = float(np.max(np.abs(c) / m ** 0.625))
    return ratio, 10.0


# ---------------------------------------------------------------- zalpha


@check("zalpha.functional_equation")
def _z_fe(rng, full):
    n = 20 if full else 6
    chi = theta.bundled_character("-4")
    f = theta.delta_form()
    worst = 0.0
    for s in _points(rng, n, (-2, 3), (-20, 20), poles=(0, 0.5, 1)):
        worst = max(worst, abs(zalpha.z_alpha(s, 0.5) - zalpha.z_alpha(0.5 - s, 0.5)))
        worst = max(worst, abs(zalpha.zeta_star(s) - zalpha.zeta_star(1 - s)))
        worst = max(worst, abs(zalpha.z_alpha_chi(s, 0.5, chi) - zalpha.z_alpha_chi(0.5 - s, 0.5, chi)))
        worst = max(worst, abs(zalpha.z_alpha_f(s + 3, 0.5, f) - zalpha.z_alpha_f(3 - s, 0.5, f)))
    return worst, 1e-9


@check("zalpha.oracle_agreement")
def _z_oracle(rng, full):
    n = 20 if full else 8
    pts = _points(rng, n, (-2, 3), (-20, 20), poles=(0, 1))
    return _worst((zalpha.z_alpha(s, 1.0), oracle.zeta_star_oracle(s)) for s in pts), 1e-9


@check("zalpha.residue_at_zero")
def _z_residue(rng, full):
    s = 1e-4
    return abs(s * zalpha.z_alpha(s, 0.5) + 1), 1e-5


@check("zalpha.residue_limit_at_alpha")
def _z_residue_alpha(rng, full):
    a = 0.5
    vals = [abs((10.0 ** -k) * zalpha.z_alpha(a + 10.0 ** -k, a) - 1) for k in (2, 3, 4)]
    shrinking = vals[0] > vals[1] > vals[2]
    return (vals[2] if shrinking else math.inf), 1e-3


@check("zalpha.vertical_decay")
def _z_decay(rng, full):
    hi = abs(zalpha.z_alpha(0.25 + 40j, 0.5))
    lo = abs(zalpha.z_alpha(0.25 + 5j, 0.5))
    return hi / lo, 1e-3


@check("zalpha.chi_special_value")
def _z_chi_value(rng, full):
    return abs(zalpha.z_alpha_chi(1.0, 1.0, theta.bundled_character("-4")) - 1.0), 1e-9


# ---------------------------------------------------------------- csformula


@check("csformula.zeta_series_identity")
def _zeta_identity(rng, full):
    tol = get_precision().series_tol
    n = 20 if full else 5
    worst = 0.0
    # two fixed anchors near the real axis keep the check sensitive to low coefficients
    pts = [2.0 + 0j, 0.3 + 1j] + _points(rng, n, (-1, 2), (-40, 40), poles=(0, 1))
    for a in (0.25, 0.5, 0.75):
        for s in pts:
            worst = max(worst, abs(csformula.riemann_series(s, a) - zalpha.zeta_star(s)))
    return worst, 2 * tol


@check("csformula.rearrangement")
def _rearrangement(rng, full):
    pts = _points(rng, 6 if full else 3, (-1, 2), (-30, 30), poles=(0, 1))
    worst = 0.0
    for a in (0.25, 0.5):
        worst = max(worst, _worst((csformula.riemann_series(s, a), csformula.riemann_series_divisor(s, a))
                                  for s in pts))
    return worst, 1e-10


@check("csformula.critical_line_form")
def _critical(rng, full):
    ts = rng.uniform(0.5, 40, 10 if full else 4)
    return _worst((csformula.critical_line_form(t), csformula.riemann_series(0.5 + 1j * t, 0.5)) for t in ts), 1e-10


@check("csformula.dirichlet_series_identity", fast=False)
def _dirichlet_identity(rng, full):
    tol = get_precision().series_tol
    worst = 0.0
    for label in ("-3", "-4", "8", "-8"):
        chi = theta.bundled_character(label)
        for s in _points(rng, 10, (-1, 2), (-20, 20)):
            ref = oracle.dirichlet_completion(s, chi) * oracle.dirichlet_l_oracle(s, chi)
            worst = max(worst, abs(csformula.dirichlet_series(s, 0.5, chi) - ref))
    return worst, 2 * tol


@check("csformula.dirichlet_series_identity_fast")
def _dirichlet_identity_fast(rng, full):
    tol = get_precision().series_tol
    worst = 0.0
    for label in ("-3", "-4", "8"):
        chi = theta.bundled_character(label)
        for s in _points(rng, 2, (-1, 2), (-20, 20)):
            ref = oracle.dirichlet_completion(s, chi) * oracle.dirichlet_l_oracle(s, chi)
            worst = max(worst, abs(csformula.dirichlet_series(s, 0.5, chi) - ref))
    return worst, 2 * tol


@check("csformula.cuspform_series_identity")
def _cusp_identity(rng, full):
    tol = get_precision().series_tol
    f = theta.delta_form()
    pts = _points(rng, 10 if full else 3, (4, 9), (-10, 10))
    return _worst((csformula.cuspform_series(s, 0.5, f), zalpha.z_alpha_f(s, 1.0, f)) for s in pts), 2 * tol


@check("csformula.conjugate_symmetry")
def _conj(rng, full):
    chi = theta.bundled_character("-4")
    f = theta.delta_form()
    s = complex(rng.uniform(-1, 2), rng.uniform(1, 15))
    sf = complex(rng.uniform(4, 9), rng.uniform(1, 10))
    evals = (
        (lambda z: csformula.riemann_series(z, 0.5), s),
        (lambda z: csformula.dirichlet_series(z, 0.5, chi), s),
        (lambda z: csformula.cuspform_series(z, 0.5, f), sf),
    )
    return _worst((fn(z.conjugate()), fn(z).conjugate()) for fn, z in evals), 1e-12


@check("csformula.tail_soundness")
def _tail(rng, full):
    chi = theta.bundled_character("-4")
    s = complex(rng.uniform(-1, 2), rng.uniform(-20, 20))
    tol = 1e-8
    ratio = 0.0
    for fam, fn in (("theta", lambda X: csformula.riemann_series(s, 0.5, cutoff=X)),
                    ("chi", lambda X: csformula.dirichlet_series(s, 0.5, chi, cutoff=X))):
        b = csformula.make_budget(fam, s, tol, alpha=0.5, chi=chi)
        change = abs(fn(2 * b.mn_cutoff) - fn(b.mn_cutoff))
        ratio = max(ratio, change / (b.est_tail + 1e-15))
    return ratio, 1.0


# ---------------------------------------------------------------- eisenstein


def _epoint(y, s, a, b=None):
    return eisenstein.EisensteinPoint(y, s, a, b)


@check("eisenstein.integral_vs_expansion", fast=False)
def _e_grid(rng, full):
    tol = get_precision().tol
    worst = 0.0
    for y in (0.5, 1, 1.5, 2):
        for s in (2, 0.8 + 2j, 0.5 + 5j):
            for a, b in ((0.5, 0.5), (0.3, 0.7)):
                p = _epoint(y, s, a, b)
                worst = max(worst, abs(eisenstein.e_integral(p) - eisenstein.e_expansion(p)))
    return worst, 2 * tol


@check("eisenstein.integral_vs_expansion_fast")
def _e_grid_fast(rng, full):
    tol = get_precision().tol
    worst = 0.0
    for y, s, a, b in ((0.5, 2, 0.5, 0.5), (1.5, 0.8 + 2j, 0.3, 0.7), (2, 0.5 + 5j, 0.3, 0.7)):
        p = _epoint(y, s, a, b)
        worst = max(worst, abs(eisenstein.e_integral(p) - eisenstein.e_expansion(p)))
    return worst, 2 * tol


@check("eisenstein.modular_symmetry")
def _e_modular(rng, full):
    worst = 0.0
    for y in (0.5, 1.5, 2.0):
        for s in (2, 0.8 + 2j):
            worst = max(worst, abs(eisenstein.e_expansion(_epoint(y, s, 0.5))
                                   - eisenstein.e_integral(_epoint(1 / y, s, 0.5))))
    return worst, 1e-9


@check("eisenstein.functional_equation")
def _e_fe(rng, full):
    worst = 0.0
    for a in (0.5, 0.75):
        for y in (0.5, 1.5):
            for s in (2, 0.8 + 2j):
                worst = max(worst, abs(eisenstein.e_expansion(_epoint(y, s, a))
                                       - eisenstein.e_expansion(_epoint(y, 2 * a - s, a))))
    return worst, 1e-9


@check("eisenstein.residues")
def _e_residues(rng, full):
    h = 1e-5
    worst = 0.0
    for a, y in ((0.5, 1.5), (0.75, 0.5)):
        worst = max(worst, abs(h * eisenstein.e_integral(_epoint(y, 2 * a + h, a)) - 1))
        worst = max(worst, abs(h * eisenstein.e_integral(_epoint(y, h, a)) + 1))
    return worst, 1e-4


@check("eisenstein.specialization")
def _e_special(rng, full):
    pts = (2.0, 0.8 + 2j, 0.5 + 5j)
    return _worst((eisenstein.e_expansion(_epoint(1.0, s, 0.5)), csformula.riemann_series(s, 0.5)) for s in pts), 1e-10


@check("eisenstein.remainder_regular_at_poles")
def _e_remainder(rng, full):
    # E minus its two Z terms is the K-Bessel sum: it stays bounded and
    # continuous across s = 0 and s = 2 alpha even though E blows up there
    a, y, h = 0.5, 1.5, 1e-4

    def rem(s):
        e = eisenstein.e_integral(_epoint(y, s, a))
        return e - zalpha.z_alpha(s, a) * y ** s - zalpha.z_alpha(s - a, a) * y ** (2 * a - s)

    worst = 0.0
    for pole in (0.0, 2 * a):
        lo, hi = rem(pole - h), rem(pole + h)
        worst = max(worst, abs(hi - lo), abs(hi) - 1.0)
    return worst, 1e-6


# ---------------------------------------------------------------- oracle


@check("oracle.zeta_functional_equation")
def _o_fe(rng, full):
    # both s and 1 - s in the unreflected half-plane, so the two sides share no code path
    pts = _points(rng, 10, (0, 1), (-30, 30), poles=(0, 1))
    return _worst((oracle.zeta_star_oracle(s), oracle.zeta_star_oracle(1 - s)) for s in pts), 1e-10


@check("oracle.hurwitz_principal")
def _o_hurwitz(rng, full):
    s = 3.0
    zeta3 = oracle.zeta_em(s).real
    worst = 0.0
    for q in (3, 4, 8, 12):
        primes = [p for p in (2, 3, 5, 7, 11) if q % p == 0]
        total = sum(oracle.hurwitz_zeta(s, a / q) for a in range(1, q + 1) if math.gcd(a, q) == 1)
        ref = zeta3 * math.prod(1 - p ** -s for p in primes)
        worst = max(worst, abs(q ** -s * total - ref))
    return worst, 1e-12


@check("oracle.dirichlet_real_on_axis")
def _o_parity(rng, full):
    worst = 0.0
    for label in ("-3", "-4", "5", "8"):
        chi = theta.bundled_character(label)
        for sigma in rng.uniform(-2, 3, 4):
            worst = max(worst, abs(oracle.dirichlet_l_oracle(sigma, chi).imag))
    return worst, 1e-14


@check("oracle.resolution_stability")
def _o_stable(rng, full):
    def rel(a, b):
        return abs(a - b) / max(1.0, abs(b))

    worst = 0.0
    chi = theta.bundled_character("-4")
    for s in _points(rng, 4, (-2, 3), (-30, 30), poles=(0, 1)):
        cfg = oracle.EMConfig.default(s)
        big = oracle.EMConfig(2 * cfg.direct_terms, cfg.bernoulli_order + 2)
        worst = max(worst, rel(oracle.zeta_em(s, cfg), oracle.zeta_em(s, big)))
        worst = max(worst, rel(oracle.hurwitz_zeta(s, 0.25, cfg), oracle.hurwitz_zeta(s, 0.25, big)))
        worst = max(worst, rel(oracle.dirichlet_l_oracle(s, chi, cfg), oracle.dirichlet_l_oracle(s, chi, big)))
    f = theta.delta_form()
    sf = complex(rng.uniform(4, 9), rng.uniform(-10, 10))
    worst = max(worst, rel(oracle.cuspform_l_oracle(sf, f), oracle.cuspform_l_oracle(sf, f, tol=5e-14)))
    return worst, 1e-12


# ---------------------------------------------------------------- cli


@check("cli.record_round_trip")
def _cli_round_trip(rng, full):
    from .cli import OutputRecord

    bad = 0
    for _ in range(100):
        r = OutputRecord.random(rng)
        if OutputRecord.from_csv_row(r.to_csv_row()) != r or OutputRecord.from_json(r.to_json()) != r:
            bad += 1
    return float(bad), 0.0


@check("cli.figure_deterministic")
def _cli_figure(rng, full):
    from .cli import figure_csv

    a = figure_csv(2, 0.5, 3.0, 0.5, 3, threads=1)
    b = figure_csv(2, 0.5, 3.0, 0.5, 3, threads=4)
    return (0.0 if a == b else 1.0), 0.0


@check("cli.exit_codes")
def _cli_exit(rng, full):
    import io

    from .cli import main

    cases = (
        (["eval", "zeta", "--s", "2"], 0),
        (["eval", "zeta", "--s", "1"], 2),
        (["dump-coeffs", "chi", "--character", "-19", "--n", "4"], 2),
        (["eval", "dirichlet", "--character", "5", "--s", "2"], 3),
    )
    wrong = 0
    for argv, want in cases:
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            got = main(argv)
        wrong += got != want
    return float(wrong), 0.0


# ---------------------------------------------------------------- runner


def select(suite: str) -> list[Check]:
    if suite == "all":
        return [c for c in _REGISTRY if not c.name.endswith("_fast")]
    if suite == "fast":
        return [c for c in _REGISTRY if c.fast]
    raise ValueError(f"unknown suite {suite!r}")


def run_checks(suite: str = "fast", seed: int = 0, inject_fault: bool = False,
               only: str | None = None) -> list[CheckResult]:
    """Run a suite and return its results in registry order.

    ``inject_fault`` perturbs c_{1/2}(2) by 1e-6 for the duration of the run.
    """
    full = suite == "all"
    chosen = [c for c in select(suite) if only is None or c.name.startswith(only)]
    ctx = powcoeffs.perturbed(powcoeffs.theta_stream(0.5), 2, 1e-6) if inject_fault else contextlib.nullcontext()
    out = []
    with ctx:
        for c in chosen:
            try:
                res, bound = c.fn(_rng(seed, c.name), full)
                out.append(CheckResult(c.name, float(res), float(bound)))
            except Exception as exc:  # a raising check is a failed check
                out.append(CheckResult(c.name, math.inf, 0.0, f"{type(exc).__name__}: {exc}"))
    return out


def format_report(results: list[CheckResult], suite: str, seed: int) -> str:
    lines = [f"suite={suite} seed={seed}"]
    lines += [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results)} checks, {failed} failed")
    return "\n".join(lines) + "\n"
