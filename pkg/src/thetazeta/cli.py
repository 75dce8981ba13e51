"""Command-line interface: ``thetazeta {eval,figure,check,dump-coeffs}``.

Exit codes: 0 success, 1 failed self-check, 2 domain or gate error,
3 numerical non-convergence.  Error records carry a machine-readable
``error`` field with the exception's code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from .config import Precision, set_precision
from .errors import DomainError, ThetaZetaError

THREADS_ENV = "THETAZETA_THREADS"


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def parse_real(text: str) -> float:
    """Decimal or simple fraction ("1/2", "-3/4")."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def parse_complex(text: str) -> complex:
    """A real (decimal or fraction) or a complex literal such as 0.5+14.13i."""
    t = text.strip().replace(" ", "")
    if not t.endswith(("i", "j")):
        return complex(parse_real(t))
    try:
        return complex(t[:-1] + "j")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


# ---------------------------------------------------------------- records


def _opt(x):
    return "" if x is None else fmt(x)


def _unopt(text: str):
    return None if text == "" else float(text)


@dataclass(frozen=True)
class OutputRecord:
    target: str
    s_re: float
    s_im: float
    alpha: float
    beta: float | None = None
    y: float | None = None
    param: str = ""  # character or form label
    tol: float | None = None
    value_re: float | None = None
    value_im: float | None = None
    abs_err_est: float | None = None
    terms: int = 0
    wall_ms: float = 0.0
    error: str = ""
    message: str = ""

    _FLOATS = ("s_re", "s_im", "alpha")
    _OPT_FLOATS = ("beta", "y", "tol", "value_re", "value_im", "abs_err_est")

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_csv_row(self) -> dict:
        row = {}
        for name in self.columns():
            v = getattr(self, name)
            if name in self._FLOATS or name == "wall_ms":
                row[name] = fmt(v)
            elif name in self._OPT_FLOATS:
                row[name] = _opt(v)
            else:
                row[name] = str(v)
        return row

    @classmethod
    def from_csv_row(cls, row: dict) -> "OutputRecord":
        kw = {}
        for name in cls.columns():
            v = row[name]
            if name in cls._FLOATS or name == "wall_ms":
                kw[name] = float(v)
            elif name in cls._OPT_FLOATS:
                kw[name] = _unopt(v)
            elif name == "terms":
                kw[name] = int(v)
            else:
                kw[name] = v
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(asdict(self), allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "OutputRecord":
        data = json.loads(text)
        for name in cls._FLOATS + ("wall_ms",):
            data[name] = float(data[name])
        return cls(**data)

    @classmethod
    def random(cls, rng) -> "OutputRecord":
        """A record with random field values, for round-trip tests."""
        def maybe(x):
            return None if rng.random() < 0.3 else x

        return cls(
            target=str(rng.choice(["zeta", "dirichlet", "cuspform", "eisenstein"])),
            s_re=float(rng.normal() * 10), s_im=float(rng.normal() * 30), alpha=float(rng.random()),
            beta=maybe(float(rng.random())), y=maybe(float(rng.lognormal())),
            param=str(rng.choice(["", "chi-4", "delta", "a,b \"q\""])),
            tol=maybe(float(10.0 ** rng.uniform(-14, -6))),
            value_re=maybe(float(rng.normal() * 10.0 ** rng.integers(-20, 20))),
            value_im=maybe(float(rng.normal())), abs_err_est=maybe(float(rng.random() * 1e-12)),
            terms=int(rng.integers(0, 10 ** 6)), wall_ms=float(rng.random() * 1e3),
            error=str(rng.choice(["", "pole_guard", "gate"])), message=str(rng.choice(["", "x\ny", "ok"])),
        )


def write_records(records, fmt_name: str, out) -> None:
    if fmt_name == "json":
        for r in records:
            out.write(r.to_json() + "\n")
        return
    w = csv.DictWriter(out, fieldnames=OutputRecord.columns(), lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.to_csv_row())


def read_records(text: str, fmt_name: str) -> list[OutputRecord]:
    if fmt_name == "json":
        return [OutputRecord.from_json(line) for line in text.splitlines() if line.strip()]
    return [OutputRecord.from_csv_row(row) for row in csv.DictReader(io.StringIO(text))]


# ---------------------------------------------------------------- inputs


def load_character(spec: str):
    from .theta import RealCharacter, bundled_character, kronecker_character

    if Path(spec).is_file():
        return RealCharacter.from_json(spec)
    try:
        return bundled_character(spec)
    except KeyError:
        pass
    try:
        disc = int(spec)
    except ValueError:
        raise DomainError(f"character {spec!r} is neither a JSON file nor a discriminant") from None
    return kronecker_character(disc)


def load_form(spec: str):
    from .theta import CuspFormSpec, delta_form

    if spec.lower() == "delta":
        return delta_form()
    if Path(spec).is_file():
        return CuspFormSpec.from_json(spec)
    raise DomainError(f"form {spec!r} is neither 'delta' nor a JSON file")


def thread_count(default: int | None = None) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return default or min(8, os.cpu_count() or 1)


# ---------------------------------------------------------------- eval


def _evaluate_point(args, s: complex) -> OutputRecord:
    from . import csformula, eisenstein

    base = dict(target=args.target, s_re=s.real, s_im=s.imag, alpha=args.alpha, tol=args.tol)
    t0 = time.perf_counter()
    if args.target == "zeta":
        r = csformula.riemann_series(s, args.alpha, tol=args.tol, full_output=True)
    elif args.target == "dirichlet":
        if args.character is None:
            raise DomainError("dirichlet needs --character")
        chi = load_character(args.character)
        base["param"] = chi.name or f"mod {chi.modulus}"
        r = csformula.dirichlet_series(s, args.alpha, chi, tol=args.tol, full_output=True)
    elif args.target == "cuspform":
        f = load_form(args.form)
        base["param"] = f.name
        r = csformula.cuspform_series(s, args.alpha, f, tol=args.tol, full_output=True)
    else:
        if args.y is None:
            raise DomainError("eisenstein needs --y")
        base.update(y=args.y, beta=args.beta)
        p = eisenstein.EisensteinPoint(args.y, s, args.alpha, args.beta)
        fn = eisenstein.e_integral if args.method == "integral" else eisenstein.e_expansion
        r = fn(p, tol=args.tol, full_output=True)
    ms = (time.perf_counter() - t0) * 1e3
    v = complex(r.value)
    return OutputRecord(**base, value_re=v.real, value_im=v.imag, abs_err_est=r.abs_err,
                        terms=r.terms, wall_ms=ms)


def cmd_eval(args, out) -> int:
    records, code = [], 0
    for s in args.s:
        try:
            records.append(_evaluate_point(args, s))
        except ThetaZetaError as exc:
            records.append(OutputRecord(args.target, s.real, s.imag, args.alpha, tol=args.tol,
                                        error=exc.code, message=str(exc)))
            code = exc.exit_code
            print(_error_record(exc), file=sys.stderr)
            break
    write_records(records, args.format, out)
    return code


# ---------------------------------------------------------------- figure


def figure_grid(t_min: float, t_max: float, step: float) -> list[float]:
    if not step > 0:
        raise DomainError("step must be positive")
    if t_min < step * (1 - 1e-9):
        raise DomainError(f"t-min must be >= step ({step}); t = 0 is excluded")
    n = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    return [round(t_min + k * step, 12) for k in range(max(n, 0))]


def _figure_row(t: float, n_max) -> tuple[float, float, float]:
    from .csformula import zeta_fig_approx
    from .oracle import zeta_em

    ref = abs(zeta_em(complex(0.5, t)))
    approx = abs(zeta_fig_approx(t, n_max=n_max))
    return ref, approx, abs(approx - ref)


def figure_rows(t_min: float, t_max: float, step: float, n_max, threads: int = 1):
    ts = figure_grid(t_min, t_max, step)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        vals = list(pool.map(lambda t: _figure_row(t, n_max), ts))
    return [(t, *v) for t, v in zip(ts, vals)]


def figure_csv(which: int, t_min: float, t_max: float, step: float, n_max=None, threads: int = 1) -> str:
    """CSV text with columns t, abs_zeta_oracle, abs_approx, abs_diff."""
    if n_max is None:
        n_max = 0 if which == 1 else 3
    return _figure_text(figure_rows(t_min, t_max, step, n_max, threads))


def _figure_text(rows) -> str:
    return "t,abs_zeta_oracle,abs_approx,abs_diff\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)


def figure_svg(rows, title: str, width: int = 800, height: int = 320) -> str:
    """Self-contained SVG with the oracle and approximation curves as polylines."""
    t = [r[0] for r in rows]
    ymax = max(max(r[1], r[2]) for r in rows) or 1.0
    t0, t1 = min(t), max(t)
    pad = 30

    def pt(x, y):
        px = pad + (x - t0) / ((t1 - t0) or 1.0) * (width - 2 * pad)
        py = height - pad - y / ymax * (height - 2 * pad)
        return f"{px:.2f},{py:.2f}"

    oracle_pts = " ".join(pt(r[0], r[1]) for r in rows)
    approx_pts = " ".join(pt(r[0], r[2]) for r in rows)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<title>{title}</title>\n'
        f'<rect width="100%" height="100%" fill="white"/>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<polyline fill="none" stroke="black" stroke-width="1" points="{oracle_pts}"/>\n'
        f'<polyline fill="none" stroke="red" stroke-width="1" stroke-dasharray="4 2" points="{approx_pts}"/>\n'
        f'<text x="{pad}" y="{pad - 10}" font-size="12">t in [{t0:g}, {t1:g}], max {ymax:.3g}</text>\n'
        "</svg>\n"
    )


def _parse_n_max(text: str):
    if text == "auto":
        return "auto"
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("n-max must be an integer or 'auto'") from None
    if n < 0:
        raise argparse.ArgumentTypeError("n-max must be >= 0")
    return n


def cmd_figure(args, out) -> int:
    n_max = args.n_max if args.n_max is not None else (0 if args.which == 1 else 3)
    t_min = args.t_min if args.t_min is not None else args.step
    threads = thread_count()
    rows = figure_rows(t_min, args.t_max, args.step, n_max, threads)
    text = _figure_text(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    if args.svg:
        Path(args.svg).write_text(figure_svg(rows, f"figure {args.which}, n_max={n_max}"))
    return 0


# ---------------------------------------------------------------- check


def cmd_check(args, out) -> int:
    from .checks import format_report, run_checks

    t0 = time.perf_counter()
    results = run_checks(args.suite, args.seed, inject_fault=args.inject_fault, only=args.only)
    out.write(format_report(results, args.suite, args.seed))
    print(f"elapsed {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------- dump-coeffs


def cmd_dump_coeffs(args, out) -> int:
    from . import powcoeffs

    if args.n < 1:
        raise DomainError("n must be >= 1")
    if args.target == "theta":
        stream = powcoeffs.theta_stream(args.alpha)
    elif args.target == "chi":
        if args.character is None:
            raise DomainError("chi needs --character")
        stream = powcoeffs.chi_stream(args.alpha, load_character(args.character))
    else:
        stream = powcoeffs.cusp_stream(args.alpha, load_form(args.form))
    vals = stream.array(args.n)
    text = "index,value\n" + "".join(f"{m},{fmt(vals[m])}\n" for m in range(1, args.n + 1))
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return 0


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetazeta", description="K-Bessel series for completed zeta and L-functions")
    p.add_argument("--config", help="JSON file with Precision fields")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate at one or more points")
    e.add_argument("target", choices=["zeta", "dirichlet", "cuspform", "eisenstein"])
    e.add_argument("--s", type=parse_complex, action="append", required=True,
                   help="evaluation point, repeatable (2, 1/2, 0.5+14.1i)")
    e.add_argument("--alpha", type=parse_real, default=0.5)
    e.add_argument("--beta", type=parse_real, help="second exponent for eisenstein (default alpha)")
    e.add_argument("--y", type=parse_real, help="eisenstein parameter y > 0")
    e.add_argument("--character", help="bundled label, fundamental discriminant or JSON file")
    e.add_argument("--form", default="delta", help="'delta' or a JSON form file")
    e.add_argument("--method", choices=["expansion", "integral"], default="expansion")
    e.add_argument("--tol", type=parse_real)
    e.add_argument("--format", choices=["csv", "json"], default="csv")

    f = sub.add_parser("figure", help="zeta(1/2+it) comparison data")
    f.add_argument("which", type=int, choices=[1, 2])
    f.add_argument("--t-min", type=parse_real)
    f.add_argument("--t-max", type=parse_real, default=40.0)
    f.add_argument("--step", type=parse_real, default=0.05)
    f.add_argument("--n-max", type=_parse_n_max)
    f.add_argument("--out")
    f.add_argument("--svg", help="also write an SVG rendering here")

    c = sub.add_parser("check", help="run the invariant suites")
    c.add_argument("--suite", choices=["fast", "all"], default="fast")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--only", help="run only checks whose name starts with this prefix")
    c.add_argument("--inject-fault", action="store_true", help="perturb c_{1/2}(2) by 1e-6 during the run")

    d = sub.add_parser("dump-coeffs", help="write power-series coefficients as CSV")
    d.add_argument("target", choices=["theta", "chi", "cuspform"])
    d.add_argument("--alpha", type=parse_real, default=0.5)
    d.add_argument("--n", type=int, default=20)
    d.add_argument("--character", help="bundled label, fundamental discriminant or JSON file")
    d.add_argument("--form", default="delta")
    d.add_argument("--out")
    return p


_COMMANDS = {"eval": cmd_eval, "figure": cmd_figure, "check": cmd_check, "dump-coeffs": cmd_dump_coeffs}


def _error_record(exc: ThetaZetaError) -> str:
    return json.dumps({"error": exc.code, "message": str(exc), "exit_code": exc.exit_code})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = sys.stdout
    try:
        if args.config:
            try:
                set_precision(Precision.from_json(args.config))
            except (OSError, ValueError, TypeError) as exc:
                raise DomainError(f"bad config {args.config}: {exc}") from None
        return _COMMANDS[args.command](args, out)
    except ThetaZetaError as exc:
        # eval reports errors in its own records; the JSON line here is for every command
        print(_error_record(exc), file=sys.stderr)
        return exc.exit_code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
