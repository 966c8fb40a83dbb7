"""Command-line entry point.

Exit status: 0 on success, 1 on any library or I/O error (one-line
diagnostic on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import __version__
from .bench import (
    COMPARE_FIELDS,
    ERROR_DOMAINS,
    PIVOT_FIELDS,
    CompareConfig,
    GridConfig,
    fmt,
    pivot_table,
    run_comparison,
    run_grid,
    write_dicts,
    write_manifest,
    write_records,
)
from .cm import EnsembleConfig, cm_ensemble_run
from .datagen import DEPENDENCE, SCALES, SHAPES, DistributionSpec, make_paper_datasets, write_generated
from .ensemble import AGGREGATORS, aggregate
from .errors import CorrSketchError
from .exact import DEFAULT_CAP, build_table, exact_report
from .im import ImConfig, im_ensemble_run
from .stream import open_stream


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _info(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def cmd_gen(args) -> None:
    if args.target == "paper":
        if args.scale is None or args.out is None:
            raise SystemExit("gen paper: --scale and --out are required")
        entries = make_paper_datasets(args.out, args.scale, args.seed)
        for e in entries:
            _info(args, f"{e.name}: n={e.n} N={e.N} l2={e.l2:.6g}")
        return
    missing = [f for f in ("n", "N", "out") if getattr(args, f) is None]
    if missing:
        raise SystemExit("gen: missing required flags: " + ", ".join("--" + m for m in missing))
    spec = DistributionSpec(args.n, args.dep, args.shape, args.seed, args.identity_perm)
    write_generated(args.out, spec, args.N)
    _info(args, f"wrote {args.N} pairs to {args.out}")


EXACT_FIELDS = ["l1", "l2", "l2_squared", "chi2", "dof", "chi2_critical", "reject_independence"]


def cmd_exact(args) -> None:
    report = exact_report(build_table(open_stream(args.path), args.cap))
    row = report.csv_row()
    _emit(_csv_text(EXACT_FIELDS, [[row[f] for f in EXACT_FIELDS]]), args.out)


CM_FIELDS = ["upsilon", "raw_l2sq", "A", "B", "agg", "seed"]
IM_FIELDS = ["upsilon", "t_value", "copies", "agg", "seed"]


def cmd_sketch_cm(args) -> None:
    cfg = EnsembleConfig(args.A, args.B, args.agg, args.seed, args.debug_identity_hash)
    res = cm_ensemble_run(cfg, open_stream(args.path))
    ests = [sk.estimate() for sk in res.sketches]
    rows = [[res.estimate, aggregate([e.raw_l2sq for e in ests], args.agg),
             args.A, args.B, args.agg, args.seed]]
    for b, e in enumerate(ests):
        rows.append([e.upsilon, e.raw_l2sq, args.A, args.B, f"run:{b}", cfg.run_seed(b)])
    _emit(_csv_text(CM_FIELDS, rows), args.out)


def cmd_sketch_im(args) -> None:
    cfg = ImConfig(args.copies, args.agg, args.seed)
    res = im_ensemble_run(cfg, open_stream(args.path))
    ests = [sk.estimate() for sk in res.sketches]
    rows = [[res.estimate, aggregate([e.t_value for e in ests], args.agg),
             args.copies, args.agg, args.seed]]
    for k, e in enumerate(ests):
        rows.append([e.upsilon, e.t_value, args.copies, f"run:{k}", cfg.run_seed(k)])
    _emit(_csv_text(IM_FIELDS, rows), args.out)


def cmd_bench_grid(args) -> None:
    cfg = GridConfig(args.dataset, args.A_values, args.B_values, args.repeats, args.seed,
                     args.agg, args.error_domain, args.reference, args.workers)
    res = run_grid(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(out / "grid_raw.csv", res.records)
    write_dicts(out / "grid_pivot.csv", res.pivot, PIVOT_FIELDS)
    if args.json_manifest:
        write_manifest(args.json_manifest, command="bench grid", config=cfg,
                       reference=res.reference, hashes=res.hashes,
                       stats=res.stats if args.record_timing else None)
    if not args.quiet:
        for row in pivot_table(res.pivot):
            print("\t".join(row), file=sys.stderr)


def cmd_bench_compare(args) -> None:
    cfg = CompareConfig(args.dataset, args.A_values, args.repeats, args.seed,
                        im_aggregator=args.im_agg, error_domain=args.error_domain,
                        reference=args.reference, workers=args.workers)
    res = run_comparison(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dicts(out / "compare.csv", res.rows, COMPARE_FIELDS)
    write_records(out / "compare_raw.csv", res.records)
    if args.json_manifest:
        write_manifest(args.json_manifest, command="bench compare", config=cfg,
                       reference=res.reference, hashes=res.hashes,
                       stats=res.stats if args.record_timing else None)
    for row in res.rows:
        _info(args, f"A={row['A']}: cm {row['cm_mult_error']:.6f}  im {row['im_mult_error']:.6f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrsketch",
        description="One-pass l2 independence sketches, exact oracle and benchmarks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="global RNG seed (default 0)")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def seed_flag(p):
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                       help="RNG seed (overrides the global --seed)")

    g = sub.add_parser("gen", help="generate a synthetic stream (or the paper bundle with 'gen paper')")
    g.add_argument("target", nargs="?", choices=["paper"], help="'paper' writes the four-dataset bundle")
    g.add_argument("--n", type=int, help="alphabet size")
    g.add_argument("--N", type=int, help="stream length")
    g.add_argument("--shape", choices=SHAPES, default="random")
    g.add_argument("--dep", choices=DEPENDENCE, default="independent")
    g.add_argument("--identity-perm", action="store_true",
                   help="assign Zipf ranks in symbol order instead of a seeded permutation")
    g.add_argument("--scale", choices=tuple(SCALES), help="bundle scale for 'gen paper'")
    g.add_argument("--out", help="output file (or directory for 'gen paper')")
    seed_flag(g)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("exact", help="exact l1/l2/chi-squared report as CSV")
    e.add_argument("path")
    e.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum alphabet size for the O(n^2) table")
    e.add_argument("--out", help="write CSV here instead of stdout")
    e.set_defaults(func=cmd_exact)

    s = sub.add_parser("sketch", help="run a sketch ensemble over a stream file")
    ssub = s.add_subparsers(dest="sketch", required=True)
    cm = ssub.add_parser("cm", help="counter-matrix sketch")
    cm.add_argument("path")
    cm.add_argument("--A", type=int, required=True, help="counter matrix side")
    cm.add_argument("--B", type=int, default=1, help="number of independent matrices")
    cm.add_argument("--agg", choices=AGGREGATORS, default="median")
    cm.add_argument("--debug-identity-hash", action="store_true",
                    help="test only: use x -> x mod A for both hashes")
    cm.add_argument("--out", help="write CSV here instead of stdout")
    seed_flag(cm)
    cm.set_defaults(func=cmd_sketch_cm)
    im = ssub.add_parser("im", help="sign sketch baseline")
    im.add_argument("path")
    im.add_argument("--copies", type=int, default=1, help="number of independent copies K")
    im.add_argument("--agg", choices=AGGREGATORS, default="mean")
    im.add_argument("--out", help="write CSV here instead of stdout")
    seed_flag(im)
    im.set_defaults(func=cmd_sketch_im)

    b = sub.add_parser("bench", help="benchmark experiments")
    bsub = b.add_subparsers(dest="bench", required=True)

    def common(p, repeats):
        p.add_argument("--dataset", required=True, help="#corrstream file")
        p.add_argument("--repeats", type=int, default=repeats)
        p.add_argument("--error-domain", choices=ERROR_DOMAINS, default="squared",
                       help="compare squared values (default) or their square roots")
        p.add_argument("--reference", type=float,
                       help="exact squared l2 (else manifest.csv next to the dataset, else oracle)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--json-manifest", help="write replay metadata (seeds, hash parameters) here")
        p.add_argument("--record-timing", action="store_true",
                       help="add throughput to the JSON manifest (makes it non-reproducible)")
        p.add_argument("--workers", type=int, default=1, help="threads for independent cells")
        seed_flag(p)

    bg = bsub.add_parser("grid", help="multiplicative error over an (A, B) grid")
    bg.add_argument("--A-values", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    bg.add_argument("--B-values", type=int, nargs="+", default=[1, 4, 16, 64, 256])
    bg.add_argument("--agg", choices=AGGREGATORS, default="median")
    common(bg, 5)
    bg.set_defaults(func=cmd_bench_grid)

    bc = bsub.add_parser("compare", help="cm(A) vs A^2 sign-sketch copies at equal space")
    bc.add_argument("--A-values", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    bc.add_argument("--im-agg", choices=AGGREGATORS, default="mean")
    common(bc, 10)
    bc.set_defaults(func=cmd_bench_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            parser.error(exc.code)
        raise
    except (CorrSketchError, OSError) as exc:
        print(f"corrsketch: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
