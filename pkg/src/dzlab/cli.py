"""Command-line interface: `dzlab <subcommand> --field ... --X ...`.

Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 capability error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cache import load_or_build
from .errors import CacheError, CapabilityError, ConfigError, DZLabError
from .fields import FieldKind, parse_field_spec
from .measures import (critical_exponent_scan, error_curve, exponent_fit, geometric_grid,
                       parse_function_spec, required_X)
from .mellin import mellin_closed, mellin_numeric
from .sieve import DEFAULT_X, HARD_CAP_X, WARN_X, mertens_report
from .zeta import compute_invariants, kappa_regression, zeta_K

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_CAPABILITY = 0, 1, 2, 3


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def parse_int(text: str) -> int:
    """Accept 1000000, 1e6 or 10**6."""
    try:
        if "**" in text:
            b, e = text.split("**")
            return int(b) ** int(e)
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_q_range(text: str) -> tuple[float, float, int]:
    """``hi:lo:points_per_decade`` (either order of hi, lo)."""
    try:
        a, b, k = text.split(":")
        a, b, k = float(a), float(b), int(k)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected hi:lo:points_per_decade, got {text!r}") from None
    hi, lo = max(a, b), min(a, b)
    if not (lo > 0 and hi > lo and k >= 1):
        raise argparse.ArgumentTypeError(f"need 0 < lo < hi and points >= 1, got {text!r}")
    return hi, lo, k


@dataclass
class ExperimentConfig:
    field_spec: str
    X: int = DEFAULT_X
    q_decades: tuple[float, float, int] | None = None
    functions: list[str] = field(default_factory=list)
    s_points: list[complex] = field(default_factory=list)
    output_dir: Path = Path(".")
    cache: bool = True

    def required_X(self) -> int:
        """Largest norm needed by any function on the q-grid."""
        if not self.q_decades or not self.functions:
            return 1
        q_min = self.q_decades[1]
        return max(required_X(parse_function_spec(f), q_min) for f in self.functions)

    def validate(self) -> None:
        if self.X < 1:
            raise ConfigError(f"X must be >= 1, got {self.X}")
        if self.X > HARD_CAP_X:
            raise ConfigError(f"X = {self.X} exceeds the hard cap {HARD_CAP_X}")
        for f in self.functions:
            parse_function_spec(f)
        need = self.required_X()
        if need > self.X:
            raise ConfigError(f"required X >= {need} for q_min = {self.q_decades[1]:g}, but X = {self.X}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", required=True, help="quad:-1, quad:5, poly:1,0,0,-2 or rational")
    p.add_argument("--X", type=parse_int, default=DEFAULT_X, help="sieve bound (default 1e6)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--cache", action=argparse.BooleanOptionalAction, default=True,
                   help="read/write the sieve cache (DZLAB_CACHE_DIR)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dzlab", description="Dedekind zeta and measure experiments")
    parser.add_argument("--version", action="version", version=f"dzlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="print field invariants")
    _common(p)
    p = sub.add_parser("sieve", help="build and cache coefficient tables")
    _common(p)
    p = sub.add_parser("mertens", help="summatory totient against kappa/(2 zeta_K(2)) x^2")
    _common(p)
    p.add_argument("--xs", type=parse_int, nargs="+", help="evaluation points (default: decades up to X)")
    p = sub.add_parser("zeta", help="zeta_K values, kappa and zeta_K(2)")
    _common(p)
    p.add_argument("--s", type=parse_complex, nargs="+", default=[2.0])
    for name, helptext in (("measure", "m_q(f) error curves and exponent fit"),
                           ("scan", "critical exponent scan")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--f", nargs="+", required=True, help="indicator:1,2 polybump:2 smooth:1,2")
        p.add_argument("--q", type=parse_q_range, default=(1e-1, 1e-5, 48), help="hi:lo:points_per_decade")
        if name == "scan":
            p.add_argument("--alphas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75])
    p = sub.add_parser("mellin", help="Mellin transform, numeric and closed form")
    _common(p)
    p.add_argument("--f", nargs="+", required=True)
    p.add_argument("--s", type=parse_complex, nargs="+", default=[1.5, 2.0, 1.25 + 1j, 2 + 3j])
    p = sub.add_parser("verify", help="run the invariant suite")
    _common(p)
    return parser


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], capture_output=True,
                             text=True, cwd=Path(__file__).resolve().parent, timeout=10)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"dzlab-{__version__}"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def header_lines(command: str, field_spec: str, X: int, inv) -> list[str]:
    return [
        f"# dzlab {command}",
        f"# field: {field_spec}",
        f"# X: {X}",
        f"# kappa: {fmt(inv.kappa)} ({inv.kappa_method.value}, error {fmt(inv.kappa_error)})",
        f"# zeta_K(2): {fmt(inv.zeta_K_2)}",
        f"# version: {git_describe()}",
        f"# generated: {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}",
    ]


def write_csv(path: Path, header: list[str], columns: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_dat(path: Path, rows) -> Path:
    """Two-column whitespace file for gnuplot."""
    with open(path, "w") as fh:
        for x, y in rows:
            fh.write(f"{fmt(x)} {fmt(y)}\n")
    return path


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _slug(spec: str) -> str:
    return spec.replace(":", "_").replace(",", "_").replace(".", "p").replace("-", "m")


def _invariants_dict(fld, inv) -> dict:
    return {
        "field": fld.spec,
        "degree": fld.degree_n,
        "signature": list(fld.signature),
        "discriminant": fld.discriminant_D,
        "kappa": inv.kappa,
        "kappa_method": inv.kappa_method.value,
        "kappa_error": inv.kappa_error,
        "zeta_K_2": inv.zeta_K_2,
        "zeta_K_2_error": inv.zeta_K_2_error,
        "mertens_constant": inv.mertens_constant,
    }


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

class Session:
    """Parsed field, tables built on demand, invariants."""

    def __init__(self, cfg: ExperimentConfig, log=print):
        self.cfg = cfg
        self.field = parse_field_spec(cfg.field_spec)
        self.log = log
        self._tables = None

    @property
    def tables(self):
        if self._tables is None:
            if self.cfg.X > WARN_X:
                self.log(f"warning: X = {self.cfg.X} > {WARN_X}; expect large memory use", file=sys.stderr)
            self._tables, cached = load_or_build(self.field, self.cfg.X, self.cfg.cache)
            self.log(f"# tables for {self.field.spec} up to X = {self.cfg.X}"
                     + (" (from cache)" if cached else ""), file=sys.stderr)
        return self._tables

    def invariants(self):
        needs = self.field.kind is FieldKind.MONOGENIC
        return compute_invariants(self.field, self.tables.ideal_count if needs else None)


def cmd_field(sess: Session, args) -> int:
    print(json.dumps(_invariants_dict(sess.field, sess.invariants()), indent=2, default=_json_default))
    return EXIT_OK


def cmd_sieve(sess: Session, args) -> int:
    from .cache import cache_path
    t = sess.tables
    k = kappa_regression(t.ideal_count)
    print(f"kappa regression estimate: {k.value:.10f} +- {k.error_bar:.2e}")
    if sess.cfg.cache:
        print(f"cache: {cache_path(sess.field.spec, t.X)}")
    return EXIT_OK


def cmd_mertens(sess: Session, args) -> int:
    X = sess.cfg.X
    xs = args.xs or [10**k for k in range(1, 20) if 10**k <= X]
    inv = sess.invariants()
    res = mertens_report(sess.tables, inv, xs)
    out = sess.cfg.output_dir / f"mertens_{_slug(sess.field.spec)}.csv"
    cols = ["x", "value", "main_term", "error", "normalized", "normalized_lindelof", "normalized_circle"]
    write_csv(out, header_lines("mertens", sess.field.spec, X, inv), cols,
              [(r.x, r.value, r.main_term, r.error, r.normalized, r.normalized_lindelof, r.normalized_circle)
               for r in res])
    write_dat(out.with_suffix(".dat"), [(r.x, r.normalized) for r in res])
    print(out)
    return EXIT_OK


def cmd_zeta(sess: Session, args) -> int:
    fld = sess.field
    table = sess.tables.ideal_count if fld.kind is FieldKind.MONOGENIC else None
    inv = sess.invariants()
    values = []
    for s in args.s:
        v = zeta_K(fld, s, table)
        values.append({"s": s, "value": v.value, "abs_err": v.abs_err})
    obj = {**_invariants_dict(fld, inv), "values": values, "version": git_describe()}
    out = write_json(sess.cfg.output_dir / f"zeta_{_slug(fld.spec)}.json", obj)
    print(out)
    return EXIT_OK


def _grid(cfg: ExperimentConfig) -> np.ndarray:
    hi, lo, k = cfg.q_decades
    return geometric_grid(hi, lo, k)


def cmd_measure(sess: Session, args) -> int:
    inv = sess.invariants()
    grid = _grid(sess.cfg)
    fits = {}
    for spec in args.f:
        f = parse_function_spec(spec)
        samples = error_curve(sess.tables, inv, f, grid)
        out = sess.cfg.output_dir / f"measure_{_slug(sess.field.spec)}_{_slug(spec)}.csv"
        write_csv(out, header_lines("measure", sess.field.spec, sess.cfg.X, inv) + [f"# f: {spec}"],
                  ["q", "m_q", "m_limit", "error", "error_over_sqrt_q"],
                  [(s.q, s.m_q, s.m_limit, s.error, s.error_over_sqrt_q) for s in samples])
        write_dat(out.with_suffix(".dat"), [(s.q, s.error) for s in samples])
        try:
            fit = exponent_fit(samples)
            fits[spec] = {"alpha_hat": fit.alpha_hat, "stderr": fit.stderr, "q_range": list(fit.q_range),
                          "n_points": fit.n_points}
        except DZLabError as exc:
            fits[spec] = {"error": str(exc)}
        print(out)
    out = write_json(sess.cfg.output_dir / f"exponent_fit_{_slug(sess.field.spec)}.json",
                     {"field": sess.field.spec, "X": sess.cfg.X, "fits": fits, "version": git_describe()})
    print(out)
    return EXIT_OK


def cmd_scan(sess: Session, args) -> int:
    inv = sess.invariants()
    grid = _grid(sess.cfg)
    for spec in args.f:
        f = parse_function_spec(spec)
        scan = critical_exponent_scan(error_curve(sess.tables, inv, f, grid), args.alphas)
        out = sess.cfg.output_dir / f"scan_{_slug(sess.field.spec)}_{_slug(spec)}.csv"
        cols = ["q"] + [f"alpha_{a:g}" for a in args.alphas]
        rows = [[q] + [scan.running_max[a][i] for a in args.alphas] for i, q in enumerate(scan.q)]
        write_csv(out, header_lines("scan", sess.field.spec, sess.cfg.X, inv) + [f"# f: {spec}"], cols, rows)
        print(out)
    return EXIT_OK


def cmd_mellin(sess: Session, args) -> int:
    inv = sess.invariants()
    fld = sess.field
    rows, checks = [], []
    for spec in args.f:
        f = parse_function_spec(spec)
        for s in args.s:
            c = mellin_closed(fld, f, s, sess.tables)
            rows.append((spec, s.real, s.imag, c.value.re, c.value.im, c.method.value, c.value.abs_err))
            if s.real >= 1.1:
                n = mellin_numeric(sess.tables, inv, f, s)
                rows.append((spec, s.real, s.imag, n.value.re, n.value.im, n.method.value, n.value.abs_err))
                rel = abs(n.value.value - c.value.value) / abs(c.value.value)
                checks.append({"f": spec, "s": s, "relative_gap": rel, "passed": rel < 1e-3})
    out = sess.cfg.output_dir / f"mellin_{_slug(fld.spec)}.csv"
    write_csv(out, header_lines("mellin", fld.spec, sess.cfg.X, inv),
              ["f", "s_re", "s_im", "value_re", "value_im", "method", "err_est"], rows)
    print(out)
    jout = write_json(sess.cfg.output_dir / f"mellin_identity_{_slug(fld.spec)}.json",
                      {"field": fld.spec, "X": sess.cfg.X, "checks": checks, "version": git_describe()})
    print(jout)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_VERIFY


def cmd_verify(sess: Session, args) -> int:
    from .verify import run_suite
    report = run_suite(sess.field, sess.tables)
    obj = report.to_dict()
    obj["version"] = git_describe()
    out = write_json(sess.cfg.output_dir / f"verify_{_slug(sess.field.spec)}.json", obj)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  [{c.module}] {c.name}")
    print(out)
    return EXIT_OK if report.passed else EXIT_VERIFY


COMMANDS = {
    "field": cmd_field, "sieve": cmd_sieve, "mertens": cmd_mertens, "zeta": cmd_zeta,
    "measure": cmd_measure, "scan": cmd_scan, "mellin": cmd_mellin, "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = ExperimentConfig(
        field_spec=args.field,
        X=args.X,
        q_decades=getattr(args, "q", None),
        functions=list(getattr(args, "f", None) or []),
        s_points=list(getattr(args, "s", None) or []),
        output_dir=args.out,
        cache=args.cache,
    )
    try:
        cfg.validate()
        if cfg.q_decades and cfg.functions:
            print(f"# required X = {cfg.required_X()} (have {cfg.X})", file=sys.stderr)
        sess = Session(cfg)
        return COMMANDS[args.command](sess, args)
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DZLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
