"""Command-line surface: validate, eigen, zerodist, sweep.

Ties the pipeline together and emits flat-file artifacts (JSON report, CSV
root and CDF tables, SVG histogram).  Exit codes are disjoint and stable:

    0  success
    1  admissibility failure
    2  usage or parse error
    3  spectral degeneracy (without --allow-degenerate)
    4  root finding failed to certify

Per-n jobs are independent and run in a process pool by default; report
rows follow the order of --n-list regardless of completion order, and
identical configs produce byte-identical outputs at fixed --digits.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import gmpy2

from . import classical, measures, operator, roots
from .numeric import bits_for_digits, format_significant
from .polycore import format_rational, parse_rational

EXIT_OK = 0
EXIT_INADMISSIBLE = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_NOCERT = 4

DEFAULT_PROBES = "2,1+1i,-3,10"


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Resolved experiment parameters; what gets embedded in every report."""

    command: str
    op_dict: dict
    n_list: list[int]
    digits: int
    law: Optional[tuple[Fraction, Fraction]]
    probes: list[str]
    allow_degenerate: bool
    out: Path
    jobs: int

    def report_dict(self) -> dict:
        # out and jobs are execution details, not experiment parameters;
        # excluding them keeps outputs byte-identical across runs that only
        # move the output directory or change parallelism.
        return {
            "command": self.command,
            "op": self.op_dict,
            "n_list": self.n_list,
            "digits": self.digits,
            "law": [format_rational(self.law[0]), format_rational(self.law[1])]
            if self.law
            else None,
            "probes": self.probes,
            "allow_degenerate": self.allow_degenerate,
            "precision_ceiling": int(
                os.environ.get(roots.PRECISION_CEILING_ENV, roots.DEFAULT_PRECISION_CEILING)
            ),
        }


# -- argument plumbing ---------------------------------------------------


def _resolve_operator(args) -> dict:
    """Operator JSON dict from --op (catalog tag) or --op-file (JSON path)."""
    if bool(args.op) == bool(args.op_file):
        raise UsageError("exactly one of --op or --op-file is required")
    if args.op:
        family = classical.parse_family(args.op)
        return classical.bochner_operator(family).to_json_dict()
    try:
        text = Path(args.op_file).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read --op-file: {e}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"--op-file is not valid JSON: {e}") from None
    # Parse eagerly so schema errors surface as usage errors with the
    # offending field named.
    operator.DiffOperator.from_json_dict(obj)
    return obj


def _parse_n_list(text: str) -> list[int]:
    try:
        ns = [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"--n-list must be comma-separated integers, got {text!r}") from None
    if not ns or any(n < 1 for n in ns):
        raise UsageError("--n-list entries must be positive")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise UsageError("--n-list must be strictly increasing")
    return ns


def _parse_law(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--law must be two comma-separated rationals, got {text!r}")
    try:
        a, b = (parse_rational(s.strip()) for s in parts)
    except ValueError as e:
        raise UsageError(f"--law: {e}") from None
    if not a < b:
        raise UsageError("--law bounds must satisfy a < b")
    return a, b


_PROBE_RE = re.compile(
    r"^\s*(?P<re>[+-]?[0-9./]+)?\s*(?P<im>[+-]\s*[0-9./]*|[+-]?[0-9./]*)i\s*$|"
    r"^\s*(?P<real_only>[+-]?[0-9./]+)\s*$"
)


def _parse_probe(text: str) -> tuple[Fraction, Fraction]:
    """Parse "re+imi" into exact (re, im); plain "re" means a real probe."""
    m = _PROBE_RE.match(text)
    if not m:
        raise UsageError(f"bad probe {text!r}; expected forms like 2, -3, 1+1i")
    if m.group("real_only") is not None:
        try:
            return Fraction(m.group("real_only")), Fraction(0)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad probe {text!r}") from None
    re_part = m.group("re") or "0"
    im_part = (m.group("im") or "").replace(" ", "")
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    try:
        return Fraction(re_part), Fraction(im_part)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad probe {text!r}") from None


def _probe_key(re_im: tuple[Fraction, Fraction]) -> str:
    re_, im = re_im
    if im == 0:
        return format_rational(re_)
    sign = "+" if im >= 0 else "-"
    return f"{format_rational(re_)}{sign}{format_rational(abs(im))}i"


def _probe_value(re_im: tuple[Fraction, Fraction], digits: int):
    re_, im = re_im
    if im == 0:
        return re_
    prec = bits_for_digits(digits)
    return gmpy2.mpc(gmpy2.mpfr(re_, prec), gmpy2.mpfr(im, prec), precision=prec)


def _merge_dash_values(argv: list[str]) -> list[str]:
    """Allow `--law -1,1` and `--probes -3,10`: argparse would otherwise
    read a leading-dash value as an option string."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--law", "--probes") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bk",
        description="Eigenpolynomials of Bochner-admissible operators and "
        "their zero-distribution experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_op_flags(p):
        p.add_argument("--op", help="catalog family tag, e.g. legendre, hermite, "
                       "jacobi:alpha=1,beta=2, laguerre:alpha=1/2, chebyshev1")
        p.add_argument("--op-file", help="path to an operator JSON spec")

    p_val = sub.add_parser("validate", help="check Bochner admissibility")
    add_op_flags(p_val)

    p_eig = sub.add_parser("eigen", help="compute one monic eigenpolynomial")
    add_op_flags(p_eig)
    p_eig.add_argument("--n", type=int, required=True, help="degree")
    p_eig.add_argument("--allow-degenerate", action="store_true",
                       help="resolve free coefficients to 0 instead of failing")

    for name, helptext in (
        ("zerodist", "root-distribution experiment over an n list"),
        ("sweep", "rescaled-measure convergence sweep over an n list"),
    ):
        p = sub.add_parser(name, help=helptext)
        add_op_flags(p)
        p.add_argument("--n-list", required=True, help="comma-separated, strictly increasing")
        p.add_argument("--digits", type=int, default=30, help="certified digits per root (default 30)")
        p.add_argument("--law", help="arcsine law bounds a,b (use --law=-1,1)")
        p.add_argument("--probes", default=DEFAULT_PROBES,
                       help=f'residual probe points "re+imi" (default "{DEFAULT_PROBES}")')
        p.add_argument("--out", default=".", help="output directory (default .)")
        p.add_argument("--allow-degenerate", action="store_true")
        p.add_argument("--jobs", type=int, default=0,
                       help="parallel per-n workers; 0 = one per n, capped at cores")
    return parser


# -- per-n worker (must stay module level for process pools) -------------


def _run_one_n(payload: tuple) -> dict:
    (op_json, n, digits, law_ab, probe_items, allow_degenerate, want_probes) = payload
    op = operator.DiffOperator.from_json_dict(json.loads(op_json))
    p = operator.eigenpolynomial(op, n, allow_degenerate)
    rs = roots.find_roots(p, digits)
    scale = max(gmpy2.mpfr(1), roots.max_radius(rs))
    rs = roots.realness(rs, scale)
    meas = measures.root_measure(rs)
    all_real = all(rs.real_flags)
    notes: list[str] = []

    ks = None
    if law_ab is not None:
        if all_real:
            law = measures.ArcsineLaw(Fraction(law_ab[0]), Fraction(law_ab[1]))
            ks = format_significant(measures.ks_distance(meas, law), digits)
        else:
            notes.append(f"n={n}: nonreal atoms, ks omitted")

    residuals: dict[str, Optional[str]] = {}
    if want_probes:
        spectral_growth = operator.validate(op).spectral_growth
        if not spectral_growth:
            notes.append(f"n={n}: deg a_N < N, residuals omitted")
        else:
            for key, re_im in probe_items:
                try:
                    val = measures.cauchy_power_residual(
                        op, n, _probe_value(re_im, digits), allow_degenerate
                    )
                except measures.ProbeTooCloseToRoot:
                    residuals[key] = None
                    notes.append(f"n={n}: probe {key} too close to a root")
                    continue
                if isinstance(val, Fraction):
                    prec = bits_for_digits(digits)
                    val = gmpy2.mpfr(val, prec)
                residuals[key] = format_significant(val, digits)

    law = measures.ArcsineLaw(Fraction(law_ab[0]), Fraction(law_ab[1])) if law_ab else None
    dist_csv = measures.cdf_overlay_csv(meas, law, digits) if all_real else None
    if dist_csv is None:
        notes.append(f"n={n}: nonreal atoms, dist csv omitted")

    return {
        "n": n,
        "ks": ks,
        "max_radius": format_significant(roots.max_radius(rs), digits),
        "residuals": residuals,
        "all_real": all_real,
        "min_certified_digits": min(rs.certified_digits),
        "roots_csv": rs.to_csv(),
        "dist_csv": dist_csv,
        "roots_re": [format_significant(z.real, digits) for z in rs.roots],
        "real_flags": list(rs.real_flags),
        "notes": notes,
    }


def _run_jobs(cfg: ExperimentConfig, want_probes: bool) -> list[dict]:
    op_json = json.dumps(cfg.op_dict)
    probe_items = [( _probe_key(p), p) for p in map(_parse_probe, cfg.probes)]
    payloads = [
        (op_json, n, cfg.digits, cfg.law, probe_items, cfg.allow_degenerate, want_probes)
        for n in cfg.n_list
    ]
    jobs = cfg.jobs if cfg.jobs > 0 else min(len(payloads), os.cpu_count() or 1)
    if jobs <= 1 or len(payloads) == 1:
        return [_run_one_n(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one_n, payloads))


# -- report assembly ------------------------------------------------------


def _law_dict(law):
    if law is None:
        return None
    return {"a": format_rational(law[0]), "b": format_rational(law[1])}


def _growth(results, digits: int):
    if len(results) < 5:
        return None
    series = [(r["n"], gmpy2.mpfr(r["max_radius"])) for r in results]
    return format_significant(measures.growth_exponent(series), digits)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit_report(cfg: ExperimentConfig, report: dict) -> None:
    _write(cfg.out / "report.json", json.dumps(report, indent=2) + "\n")


def _measure_from_strings(res: dict, digits: int) -> measures.RootMeasure:
    prec = bits_for_digits(digits)
    return measures.RootMeasure(
        [gmpy2.mpc(gmpy2.mpfr(s, prec), gmpy2.mpfr(0, prec), precision=prec)
         for s in res["roots_re"]]
    )


def _histogram_svg(xs: list[float], law_ab: Optional[tuple[float, float]]) -> str:
    """Static histogram of a rescaled measure with a reference density.

    Bars are the normalized histogram of the atoms; the polyline is the
    arcsine density on the given bounds (default [-1, 1]); it is clipped at
    the plot ceiling since the density diverges at the endpoints.
    """
    W, H, ml, mr, mt, mb = 800, 480, 60, 20, 30, 45
    pw, ph = W - ml - mr, H - mt - mb
    lo, hi = min(xs), max(xs)
    span = hi - lo or 1.0
    lo, hi = lo - 0.02 * span, hi + 0.02 * span
    bins = 24
    w = (hi - lo) / bins
    counts = [0] * bins
    for x in xs:
        counts[min(bins - 1, int((x - lo) / w))] += 1
    dens = [c / (len(xs) * w) for c in counts]
    ymax = 1.3 * max(dens) if max(dens) > 0 else 1.0

    def X(x):
        return ml + (x - lo) / (hi - lo) * pw

    def Y(y):
        return mt + ph - min(y, ymax) / ymax * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for i, d in enumerate(dens):
        if d <= 0:
            continue
        x0 = X(lo + i * w)
        x1 = X(lo + (i + 1) * w)
        y = Y(d)
        parts.append(
            f'<rect x="{x0:.2f}" y="{y:.2f}" width="{x1 - x0:.2f}" '
            f'height="{mt + ph - y:.2f}" fill="#7aa6c2"/>'
        )
    a, b = law_ab if law_ab else (-1.0, 1.0)
    pts = []
    for k in range(1, 256):
        x = a + (b - a) * k / 256
        if lo < x < hi:
            rho = 1.0 / (math.pi * math.sqrt((b - x) * (x - a)))
            pts.append(f"{X(x):.2f},{Y(rho):.2f}")
    if pts:
        parts.append(
            f'<polyline points="{" ".join(pts)}" fill="none" '
            'stroke="#c0392b" stroke-width="1.5"/>'
        )
    parts.append(
        f'<text x="{ml}" y="{H - 12}" font-family="monospace" font-size="12">'
        f"x: [{lo:.4f}, {hi:.4f}]   bars: rescaled root measure   "
        f"line: arcsine density on [{a:g}, {b:g}]</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- subcommands -----------------------------------------------------------


def _cmd_validate(args) -> int:
    op_dict = _resolve_operator(args)
    op = operator.DiffOperator.from_json_dict(op_dict)
    report = operator.validate(op)
    print(json.dumps(report.to_json_dict(), indent=2))
    return EXIT_OK if report.admissible else EXIT_INADMISSIBLE


def _cmd_eigen(args) -> int:
    op_dict = _resolve_operator(args)
    op = operator.DiffOperator.from_json_dict(op_dict)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    if not operator.validate(op).admissible:
        print("error: operator is not Bochner-admissible", file=sys.stderr)
        return EXIT_INADMISSIBLE
    try:
        result = operator.eigenpolynomial_info(op, args.n, args.allow_degenerate)
    except operator.DegenerateSpectrum as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    print(json.dumps(result.poly.to_coeff_strings()))
    print(result.poly)
    if result.free_indices:
        print(
            f"note: free indices resolved to 0: {list(result.free_indices)}",
            file=sys.stderr,
        )
    return EXIT_OK


def _experiment_config(args, command: str) -> ExperimentConfig:
    op_dict = _resolve_operator(args)
    n_list = _parse_n_list(args.n_list)
    if args.digits < 1:
        raise UsageError("--digits must be positive")
    law = _parse_law(args.law) if args.law else None
    probes = [s.strip() for s in args.probes.split(",") if s.strip()]
    for s in probes:
        _parse_probe(s)  # fail fast on malformed probes
    probes = [_probe_key(_parse_probe(s)) for s in probes]
    return ExperimentConfig(
        command=command,
        op_dict=op_dict,
        n_list=n_list,
        digits=args.digits,
        law=law,
        probes=probes,
        allow_degenerate=args.allow_degenerate,
        out=Path(args.out),
        jobs=args.jobs,
    )


def _cmd_zerodist(args) -> int:
    cfg = _experiment_config(args, "zerodist")
    op = operator.DiffOperator.from_json_dict(cfg.op_dict)
    if not operator.validate(op).admissible:
        print("error: operator is not Bochner-admissible", file=sys.stderr)
        return EXIT_INADMISSIBLE
    results = _run_jobs(cfg, want_probes=True)
    notes: list[str] = []
    rows = []
    for r in results:
        notes.extend(r["notes"])
        rows.append(
            {
                "n": r["n"],
                "ks": r["ks"],
                "max_radius": r["max_radius"],
                "residual_x2": r["residuals"].get("2"),
                "residuals": r["residuals"],
                "all_real": r["all_real"],
                "min_certified_digits": r["min_certified_digits"],
            }
        )
        _write(cfg.out / f"roots_{r['n']}.csv", r["roots_csv"])
        if r["dist_csv"] is not None:
            _write(cfg.out / f"dist_{r['n']}.csv", r["dist_csv"])
    report = {
        "op": cfg.op_dict,
        "law": _law_dict(cfg.law),
        "rows": rows,
        "growth_exponent": _growth(results, cfg.digits),
        "notes": notes,
        "config": cfg.report_dict(),
    }
    _emit_report(cfg, report)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _experiment_config(args, "sweep")
    if len(cfg.n_list) < 5:
        raise UsageError("sweep needs an --n-list of length >= 5")
    op = operator.DiffOperator.from_json_dict(cfg.op_dict)
    if not operator.validate(op).admissible:
        print("error: operator is not Bochner-admissible", file=sys.stderr)
        return EXIT_INADMISSIBLE
    results = _run_jobs(cfg, want_probes=False)
    notes: list[str] = []
    rows = []
    prev_rescaled: Optional[measures.RootMeasure] = None
    final_rescaled: Optional[measures.RootMeasure] = None
    for r in results:
        notes.extend(r["notes"])
        ks_prev = None
        if r["all_real"]:
            meas = _measure_from_strings(r, cfg.digits)
            scaled = measures.rescale(meas, gmpy2.mpfr(r["max_radius"]))
            if prev_rescaled is not None:
                ks_prev = format_significant(
                    gmpy2.mpfr(measures.ks_two_sample(prev_rescaled, scaled), 64),
                    cfg.digits,
                )
            prev_rescaled = scaled
            final_rescaled = scaled
        else:
            notes.append(f"n={r['n']}: nonreal atoms, rescaled ks omitted")
            prev_rescaled = None
        rows.append(
            {
                "n": r["n"],
                "max_radius": r["max_radius"],
                "ks_prev_rescaled": ks_prev,
                "all_real": r["all_real"],
                "min_certified_digits": r["min_certified_digits"],
            }
        )
        _write(cfg.out / f"roots_{r['n']}.csv", r["roots_csv"])
    report = {
        "op": cfg.op_dict,
        "law": _law_dict(cfg.law),
        "rows": rows,
        "growth_exponent": _growth(results, cfg.digits),
        "notes": notes,
        "config": cfg.report_dict(),
    }
    _emit_report(cfg, report)
    if final_rescaled is not None:
        xs = [float(z.real) for z in final_rescaled.atoms]
        law_ab = (float(cfg.law[0]), float(cfg.law[1])) if cfg.law else None
        _write(cfg.out / "hist.svg", _histogram_svg(xs, law_ab))
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(_merge_dash_values(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "eigen":
            return _cmd_eigen(args)
        if args.command == "zerodist":
            return _cmd_zerodist(args)
        return _cmd_sweep(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except operator.InadmissibleOperator as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except operator.DegenerateSpectrum as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except roots.NoConvergence as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOCERT
    except (ValueError, classical.BadParameters) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
