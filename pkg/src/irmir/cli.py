"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import report
from .errors import IRMIRError, UsageError, ZeroMeanChannel
from .ingest import decode_image, load_manifest
from .optimizer import grid_upper_bound, k_grid, sweep, two_symbol_grid

log = logging.getLogger("irmir")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _distances(text):
    try:
        ds = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not ds or any(d < 1 for d in ds):
        raise argparse.ArgumentTypeError("feature distances must be positive integers")
    return ds


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--channel", choices=["r", "g", "b", "all"], default="all")
    common.add_argument("--distance", type=_distances, default=None, metavar="D[,D...]",
                        help="feature distance(s); default 1 (8 for optimize)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--precision", type=int, default=6, help="significant digits")
    common.add_argument("--scale-e03", action="store_true",
                        help="report pixel counts in thousands")
    common.add_argument("--external-counts", metavar="CSV",
                        help="detector counts keyed by image path")
    common.add_argument("-o", "--output", help="write to file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="irmir", description="Information ratio image features.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common], help="entropy, IR and LIR per channel")
    s.add_argument("image")

    s = sub.add_parser("match", parents=[common], help="MI, MIR and LMIR of an image pair")
    s.add_argument("image_a")
    s.add_argument("image_b")

    s = sub.add_parser("sweep", parents=[common], help="IR/LIR over a brightness grid")
    s.add_argument("image")
    s.add_argument("--kmin", type=_positive_float, default=0.9)
    s.add_argument("--kmax", type=_positive_float, default=None,
                   help="default: 255 / channel mean")
    s.add_argument("--kstep", type=_positive_float, default=0.1)

    s = sub.add_parser("optimize", parents=[common], help="IR-based brightness optimizer")
    s.add_argument("image")
    s.add_argument("--timing", action="store_true", help="add an elapsed-seconds column")

    s = sub.add_parser("batch", parents=[common], help="per-category means over a manifest")
    s.add_argument("manifest")
    s.add_argument("--mode", choices=["analyze", "match", "optimize"], default="analyze")
    s.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("twosymbol", parents=[common], help="two-symbol IR vs entropy curve")
    s.add_argument("--nm", type=int, default=1000)
    s.add_argument("--pgrid-steps", type=int, default=200)
    return p


def _ext(args):
    return report.ExternalCounts.load(args.external_counts) if args.external_counts else None


def _ext_columns(ext):
    return list(ext.columns) if ext else []


def cmd_analyze(args):
    ext = _ext(args)
    img = decode_image(args.image)
    if img.lossy:
        log.warning("%s is JPEG; decoder differences change exact IR values", args.image)
    rows = report.analyze_rows(args.image, img, report.select_channels(args.channel),
                               args.distance or [1], ext)
    return rows, report.ANALYZE_COLUMNS + _ext_columns(ext), _ext_columns(ext)


def cmd_match(args):
    ext = _ext(args)
    a, b = decode_image(args.image_a), decode_image(args.image_b)
    rows = report.match_rows(args.image_a, a, args.image_b, b,
                             report.select_channels(args.channel), args.distance or [1], ext)
    return rows, report.MATCH_COLUMNS + _ext_columns(ext), _ext_columns(ext)


def cmd_sweep(args):
    img = decode_image(args.image)
    rows = []
    for c in report.select_channels(args.channel):
        ch = img.channel(c)
        if args.kmax is None:
            try:
                kmax = grid_upper_bound(ch)
            except ZeroMeanChannel:
                log.warning("channel %s has zero mean; pass --kmax to sweep it", c)
                continue
        else:
            kmax = args.kmax
        grid = k_grid(args.kmin, args.kstep, kmax)
        for d in args.distance or [1]:
            curve = sweep(ch, d, grid)
            rows.extend({"image": args.image, "channel": c, "d": d, "K": s.k, "ir": s.ir,
                         "lir": s.lir} for s in curve.samples)
    return rows, report.SWEEP_COLUMNS, []


def cmd_optimize(args):
    ext = _ext(args)
    img = decode_image(args.image)
    rows = report.optimize_rows(args.image, img, report.select_channels(args.channel),
                                args.distance or [8], timing=args.timing, ext=ext)
    cols = report.OPTIMIZE_COLUMNS + (["elapsed"] if args.timing else [])
    return rows, cols + _ext_columns(ext), _ext_columns(ext)


def cmd_batch(args):
    ext = _ext(args)
    entries = load_manifest(args.manifest)
    default_d = [8] if args.mode == "optimize" else [1]
    outcome = report.run_batch(entries, args.mode, report.select_channels(args.channel),
                               args.distance or default_d, ext, jobs=max(1, args.jobs))
    extc = _ext_columns(ext)
    rows = report.aggregate(outcome.rows, args.mode, extc)
    n_fail, n_skip = len(outcome.failures), len(outcome.skipped)
    if n_fail or n_skip:
        log.warning("batch: %d processed, %d failed, %d skipped", outcome.processed, n_fail, n_skip)
    if entries and outcome.processed == 0 and n_fail:
        raise _AllFailed(f"all {n_fail} manifest entries failed")
    return rows, report.batch_columns(args.mode, extc), extc


class _AllFailed(IRMIRError):
    pass


def cmd_twosymbol(args):
    if args.nm < 2:
        raise UsageError("--nm must be at least 2")
    if args.pgrid_steps < 1:
        raise UsageError("--pgrid-steps must be at least 1")
    rows = report.twosymbol_rows(args.nm, two_symbol_grid(args.nm, args.pgrid_steps))
    return rows, report.TWOSYMBOL_COLUMNS, []


COMMANDS = {
    "analyze": cmd_analyze,
    "match": cmd_match,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "batch": cmd_batch,
    "twosymbol": cmd_twosymbol,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        rows, columns, extra = COMMANDS[args.command](args)
        if args.scale_e03:
            report.scale_e03(rows, extra)
        text = report.render(rows, columns, args.format, args.precision)
    except UsageError as exc:
        print(f"irmir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IRMIRError as exc:
        print(f"irmir: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    finally:
        log.removeHandler(handler)

    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
