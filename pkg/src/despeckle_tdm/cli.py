"""``despeckle-tdm`` command line: speckle | despeckle | metrics | bench | phantom.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .config import ConfigError, default_suite_path, load_run_config, load_suite
from .grid import PGMError, check_same_shape, load_pgm, save_pgm
from .metrics import REPORT_FIELDS, evaluate, mor_vor
from .phantoms import PHANTOMS, make_phantom
from .solvers import CFLError, SolverError, run
from .speckle import SpeckleParams, apply_speckle, sample_speckle_field

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

HISTORY_FIELDS = ("step", "rel_change", "psnr", "gs_sweeps", "max_g")

log = logging.getLogger("despeckle_tdm")


def _fail(message: str, code: int) -> int:
    print(f"despeckle-tdm: error: {message}", file=sys.stderr)
    return code


def cmd_speckle(args) -> int:
    clean = load_pgm(args.input)
    noise = sample_speckle_field(SpeckleParams(args.looks, args.seed), clean.width, clean.height)
    save_pgm(apply_speckle(clean, noise), args.output)
    mor, vor = mor_vor(noise)
    print(f"noise_mor={mor:.6g} noise_vor={vor:.6g} expected_vor={1.0 / args.looks:.6g}")
    return EXIT_OK


def history_path(output: Path) -> Path:
    return output.with_name(output.stem + ".history.csv")


def cmd_despeckle(args) -> int:
    dcfg, scfg = load_run_config(args.config)
    noisy = load_pgm(args.input)
    reference = None
    if args.reference is not None:
        reference = load_pgm(args.reference)
        check_same_shape(noisy.data, reference.data)
    if scfg.stop == "best_psnr" and reference is None:
        raise ConfigError("best_psnr stopping needs --reference", "stop")
    result = run(noisy, scfg, dcfg, reference=reference)
    output = Path(args.output)
    save_pgm(result.restored, output)
    rows = [vars(rec) for rec in result.history]
    hist = Path(args.history) if args.history else history_path(output)
    hist.write_text(bench.csv_text(rows, HISTORY_FIELDS))
    print(f"steps={result.steps} returned_step={result.best_step} history={hist}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    clean, noisy, restored = (load_pgm(p) for p in (args.clean, args.noisy, args.restored))
    check_same_shape(clean.data, noisy.data, restored.data)
    report = evaluate(clean, noisy, restored, looks=args.looks, si_window=args.si_window)
    sys.stdout.write(bench.csv_text([report.as_row()], REPORT_FIELDS))
    if report.si_flagged:
        log.warning("%d pixels had a local mean below the floor and contributed 0 to SI",
                    report.si_flagged)
    return EXIT_OK


def cmd_bench(args) -> int:
    cases = load_suite(args.suite or default_suite_path())
    rows = bench.run_suite(cases, jobs=args.jobs)
    Path(args.output).write_text(bench.report_csv(rows, timing=not args.no_timing))
    failed = [r["label"] for r in rows if r["status"] != "ok"]
    print(f"cases={len(rows)} failed={len(failed)} report={args.output}")
    for label in failed:
        print(f"  failed: {label}", file=sys.stderr)
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_phantom(args) -> int:
    save_pgm(make_phantom(args.kind, args.width, args.height or args.width), args.output)
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="despeckle-tdm",
                                     description="Speckle synthesis and PDE despeckling.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("speckle", help="multiply an image by seeded Gamma speckle")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--looks", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_speckle)

    p = sub.add_parser("despeckle", help="run a diffusion or telegraph filter")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--reference")
    p.add_argument("--history", help="history CSV path (default: <out stem>.history.csv)")
    p.set_defaults(func=cmd_despeckle)

    p = sub.add_parser("metrics", help="print quality measures as one CSV row")
    p.add_argument("--clean", required=True)
    p.add_argument("--noisy", required=True)
    p.add_argument("--restored", required=True)
    p.add_argument("--si-window", type=int, default=3)
    p.add_argument("--looks", type=_positive_int, help="look number, for normalized VoR")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="run a benchmark suite and write a CSV report")
    p.add_argument("--suite", help="suite TOML (default: bundled 96-case suite)")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--no-timing", action="store_true", help="omit wall_time for byte-stable output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("phantom", help="write a synthetic clean image")
    p.add_argument("kind", choices=PHANTOMS)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int)
    p.set_defaults(func=cmd_phantom)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(f"config: {exc}", EXIT_USAGE)
    except CFLError as exc:
        return _fail(str(exc), EXIT_FAILURE)
    except (PGMError, SolverError, OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_FAILURE)


if __name__ == "__main__":
    sys.exit(main())
