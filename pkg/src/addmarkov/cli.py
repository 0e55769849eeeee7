"""Command-line interface: ``addmarkov <command> ...``.

Exit codes: 0 success, 2 validation or argument error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .chain import (AdditiveChainSpec, SpecError, StepWiseChainSpec, linear_memory, load_spec,
                    validate)
from .correlation import correlation_from_memory, estimate_correlation
from .entropy import MAX_ORDER, MAX_WORD, empirical_entropy_curve, entropy_curve
from .equivalence import map_empirical, map_to_stepwise
from .generator import (PRNG_ID, GenerationConfig, SequenceFormatError, generate, read_sequence,
                        worker_count, write_sequence)
from .temperature import TemperatureError, temperature_report

log = logging.getLogger("addmarkov")

DEFAULT_SEED = 42
FIGURE_LENGTH = 10_000_000
FIG_ORDER = 10
FIG_F0 = 0.15
FIG2_ORDERS = (5, 8, 20)
FIG2_POINTS = 50
FIG2_EDGE = 0.98
FIG1_RMAX = 30
FIG3_LMAX = 11


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def csv_text(header, rows) -> str:
    lines = [",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def manifest(args, **extra) -> dict:
    data = {"command": args.command, "argv": sys.argv[1:], "tool_version": __version__,
            "prng": PRNG_ID, "seed": args.seed,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    data.update(extra)
    return data


def emit(args, text: str, meta: dict, out=None) -> None:
    """Write ``text`` to the output path (or stdout) with a sidecar manifest."""
    out = out or args.out
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.write_text(text)
        Path(f"{path}.manifest.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", 3) from exc
    if not args.quiet:
        log.info("wrote %s", path)


def read_spec_file(path):
    try:
        spec = load_spec(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", 3) from exc
    report = validate(spec)
    if not report.ok:
        raise CliError(f"invalid spec {path}: {report.describe()}", 2)
    return spec


def require_additive(spec):
    if not isinstance(spec, AdditiveChainSpec):
        raise CliError("this command needs an additive chain spec", 2)
    return spec


def cmd_generate(args):
    spec = read_spec_file(args.spec)
    config = GenerationConfig(args.length, args.seed, args.burn_in)
    seq = generate(spec, config)
    if args.out is None:
        raise CliError("generate needs --out", 2)
    try:
        write_sequence(seq, args.out, args.format)
        meta = manifest(args, format=args.format, **seq.provenance)
        Path(f"{args.out}.manifest.json").write_text(json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", 3) from exc
    if not args.quiet:
        log.info("wrote %d symbols to %s (mean %.6f)", len(seq), args.out, seq.mean)


def _looks_like_spec(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(1) == b"{"


def cmd_analyze(args):
    try:
        is_spec = _looks_like_spec(args.input)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc}", 3) from exc
    if is_spec:
        spec = require_additive(read_spec_file(args.input))
        exact = correlation_from_memory(spec, args.rmax)
        seq = generate(spec, GenerationConfig(args.length, args.seed, args.burn_in))
        emp = estimate_correlation(seq, args.rmax)
        rows = [(r, exact[r], emp[r]) for r in range(args.rmax + 1)]
        text = csv_text(("r", "K_exact", "K_empirical"), rows)
        meta = manifest(args, spec=spec.to_dict(), length=args.length, rmax=args.rmax)
    else:
        try:
            seq = read_sequence(args.input)
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc}", 3) from exc
        emp = estimate_correlation(seq, args.rmax)
        text = emp.to_csv()
        meta = manifest(args, input=str(args.input), length=len(seq), rmax=args.rmax)
    emit(args, text, meta)


def cmd_map(args):
    spec = require_additive(read_spec_file(args.spec))
    if args.k_mode == "exact":
        report = map_to_stepwise(spec)
    else:
        seq = generate(spec, GenerationConfig(args.length, args.seed, args.burn_in))
        report = map_empirical(spec, seq)
    emit(args, report.to_json() + "\n",
         manifest(args, spec=spec.to_dict(), k_mode=args.k_mode, length=args.length))


def cmd_temperature(args):
    if args.spec is not None:
        spec = read_spec_file(args.spec)
        if isinstance(spec, AdditiveChainSpec):
            order, mu = spec.order, map_to_stepwise(spec).mu
        else:
            order, mu = spec.order, spec.mu
    elif args.mu is not None:
        order, mu = args.N, args.mu
    else:
        raise CliError("temperature needs --mu or a spec file", 2)
    if order < 1:
        raise CliError("--N must be >= 1", 2)
    try:
        report = temperature_report(order, mu)
    except TemperatureError as exc:
        raise CliError(str(exc), 2) from exc
    emit(args, json.dumps(report.to_dict(), indent=2) + "\n", manifest(args, N=order, mu=mu))


def _exact_ok(order, L_max):
    return order <= MAX_ORDER and L_max + 1 <= MAX_WORD


def cmd_entropy(args):
    spec = read_spec_file(args.spec)
    meta = manifest(args, spec=spec.to_dict(), Lmax=args.Lmax)
    if args.compare_stepwise:
        spec = require_additive(spec)
        sw = map_to_stepwise(spec).stepwise(spec.order)
        if args.mu is not None:
            sw = StepWiseChainSpec(sw.order, args.mu, sw.nu)
        curves = [_curve(args, s) for s in (spec, sw)]
        rows = [(L, curves[0].h[L], curves[1].h[L]) for L in range(args.Lmax + 1)]
        meta["stepwise"] = sw.to_dict()
        emit(args, csv_text(("L", "h_additive", "h_stepwise"), rows), meta)
        return
    curve = _curve(args, spec)
    emit(args, curve.to_csv(), meta)


def _curve(args, spec):
    if _exact_ok(spec.order, args.Lmax) and not args.empirical:
        return entropy_curve(spec, args.Lmax)
    if not args.empirical:
        log.warning("N=%d, Lmax=%d exceed the exact-mode caps; using empirical estimates",
                    spec.order, args.Lmax)
    seq = generate(spec, GenerationConfig(args.length, args.seed, args.burn_in))
    return empirical_entropy_curve(seq, args.Lmax)


def fig2_table():
    """inv_tau(F0) for each order on the union of the per-order F0 sweeps.

    Cells are empty where F0 lies outside that order's sweep range.
    """
    limits = {n: 2.0 / (n - 1) for n in FIG2_ORDERS}
    raw = sorted(float(x) for n in FIG2_ORDERS
                 for x in np.linspace(0.0, FIG2_EDGE * limits[n], FIG2_POINTS))
    # sweeps of different orders share some points up to rounding
    grid = [raw[0]] + [b for a, b in zip(raw, raw[1:]) if b - a > 1e-12]

    def column(n):
        values = []
        for f0 in grid:
            if f0 > FIG2_EDGE * limits[n] * (1 + 1e-12):
                values.append(None)
            else:
                values.append(map_to_stepwise(AdditiveChainSpec(n, 0.5, linear_memory(n, f0))).inv_tau)
        return values

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        columns = list(pool.map(column, FIG2_ORDERS))
    rows = [(f0, *(col[i] for col in columns)) for i, f0 in enumerate(grid)]
    return ("F0", *(f"inv_tau_N{n}" for n in FIG2_ORDERS)), rows, limits


def fig_spec() -> AdditiveChainSpec:
    return AdditiveChainSpec(FIG_ORDER, 0.5, linear_memory(FIG_ORDER, FIG_F0))


def cmd_figure(args):
    outdir = Path(args.out or ".")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {outdir}: {exc}", 3) from exc
    spec = fig_spec()
    meta = manifest(args, figure=args.which)
    if args.which == "fig1":
        exact = correlation_from_memory(spec, FIG1_RMAX)
        seq = generate(spec, GenerationConfig(args.length, args.seed))
        emp = estimate_correlation(seq, FIG1_RMAX)
        text = csv_text(("r", "K_exact", "K_empirical"),
                        [(r, exact[r], emp[r]) for r in range(FIG1_RMAX + 1)])
        meta.update(spec=spec.to_dict(), length=args.length, rmax=FIG1_RMAX)
    elif args.which == "fig2":
        header, rows, limits = fig2_table()
        text = csv_text(header, rows)
        meta.update(orders=list(FIG2_ORDERS), abar=0.5, points_per_order=FIG2_POINTS,
                    edge_fraction=FIG2_EDGE, F0_divergence={str(n): v for n, v in limits.items()})
    else:
        report = map_to_stepwise(spec)
        mu = report.mu if args.mu is None else args.mu
        sw = StepWiseChainSpec(FIG_ORDER, mu, 0.0)
        curves = [entropy_curve(s, FIG3_LMAX) for s in (spec, sw)]
        header = ["L", "h_additive", "h_stepwise"]
        cols = [curves[0].h, curves[1].h]
        if args.empirical:
            for s in (spec, sw):
                seq = generate(s, GenerationConfig(args.length, args.seed))
                cols.append(empirical_entropy_curve(seq, FIG3_LMAX).h)
            header += ["h_additive_empirical", "h_stepwise_empirical"]
        rows = [(L, *(c[L] for c in cols)) for L in range(FIG3_LMAX + 1)]
        text = csv_text(header, rows)
        meta.update(spec=spec.to_dict(), stepwise=sw.to_dict(), Lmax=FIG3_LMAX,
                    empirical=bool(args.empirical), length=args.length if args.empirical else None)
    emit(args, text, meta, out=outdir / f"{args.which}.csv")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="PRNG seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file or directory")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="addmarkov", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="PRNG seed (default 42)")
    parser.add_argument("--out", default=None, help="output file or directory")
    parser.add_argument("--quiet", action="store_true", default=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="generate a symbol sequence")
    p.add_argument("spec")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--format", choices=("text", "packed"), default="packed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", parents=[common], help="correlation function of a sequence or spec")
    p.add_argument("input", help="sequence file, or spec JSON for exact + empirical columns")
    p.add_argument("--rmax", type=int, default=FIG1_RMAX)
    p.add_argument("--length", type=int, default=FIGURE_LENGTH)
    p.add_argument("--burn-in", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("map", parents=[common], help="map an additive chain onto a step-wise chain")
    p.add_argument("spec")
    p.add_argument("--k-mode", choices=("exact", "empirical"), default="exact")
    p.add_argument("--length", type=int, default=FIGURE_LENGTH)
    p.add_argument("--burn-in", type=int, default=None)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("temperature", parents=[common], help="information temperature")
    p.add_argument("spec", nargs="?")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--mu", type=float)
    p.set_defaults(func=cmd_temperature)

    p = sub.add_parser("entropy", parents=[common], help="block and conditional entropies")
    p.add_argument("spec")
    p.add_argument("--Lmax", type=int, default=FIG3_LMAX)
    p.add_argument("--compare-stepwise", action="store_true",
                   help="additive spec: emit L,h_additive,h_stepwise against its step-wise image")
    p.add_argument("--mu", type=float, help="override the step-wise mu in --compare-stepwise")
    p.add_argument("--empirical", action="store_true", help="estimate from a generated sequence")
    p.add_argument("--length", type=int, default=FIGURE_LENGTH)
    p.add_argument("--burn-in", type=int, default=None)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("figure", parents=[common], help="reproduce figure data as CSV")
    p.add_argument("which", choices=("fig1", "fig2", "fig3"))
    p.add_argument("--length", type=int, default=FIGURE_LENGTH)
    p.add_argument("--empirical", action="store_true", help="fig3: add simulated overlays")
    p.add_argument("--mu", type=float, help="fig3: step-wise mu (default: mapped value)")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except SequenceFormatError as exc:
        log.error("%s", exc)
        return 3
    except (SpecError, TemperatureError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
