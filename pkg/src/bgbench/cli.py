"""Command line entry point: ``bgbench {run,compare,bench,synth}``.

Exit codes: 0 on success, 1 on domain or I/O errors, 2 on usage errors.
Data and tables go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional

from .bench import BenchConfig, emit_report, run_benchmark
from .bgmodels import ALGORITHMS, DEFAULT_THRESHOLD, MogParams
from .density import DEFAULT_LAMBDA
from .errors import BgBenchError
from .evaluation import evaluate, load_ground_truth
from .imaging import load_manifest, read_pnm
from .pipeline import PipelineConfig, format_density_csv, read_density_csv, run_sequence
from .synth import SynthConfig, generate, write_sequence

THREADS_ENV = "BGBENCH_THREADS"


class UsageError(Exception):
    pass


def _car_range(text: str):
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            break
    else:
        lo = hi = text
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad car range {text!r}, expected e.g. 0..5") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad car range {text!r}")
    return lo, hi


def _int_list(text: str):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad worker list {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"bad worker list {text!r}")
    return sorted(set(vals))


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", type=Path, help="MogParams JSON file")
    p.add_argument("--min-area", type=int, default=50, help="smallest blob kept, in pixels")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                   help="top-to-bottom perspective weight ratio")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="difference threshold for framediff/staticbg")
    p.add_argument("--se-size", type=int, default=3, help="side of the square opening element")


def _pipeline_config(args) -> PipelineConfig:
    mog = MogParams.load(args.params) if args.params else MogParams()
    if args.se_size < 1 or args.se_size % 2 == 0:
        raise UsageError("--se-size must be an odd integer >= 1")
    if args.min_area < 0:
        raise UsageError("--min-area must be >= 0")
    return PipelineConfig(mog=mog, threshold=args.threshold, se_size=args.se_size,
                          min_area=args.min_area, lam=args.lam)


def _write_text(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8", newline="")


def cmd_run(args) -> int:
    config = _pipeline_config(args)
    manifest = load_manifest(args.manifest)
    frames = manifest.load_frames()
    reference = read_pnm(args.reference) if args.reference else None
    records = run_sequence(frames, args.algo, config, timed=not args.no_timing, reference=reference)
    _write_text(format_density_csv(records, timing=not args.no_timing), args.out)
    return 0


def cmd_compare(args) -> int:
    truth = load_ground_truth(args.ground_truth)
    by_algo = {}
    for path in args.densities:
        for rec in read_density_csv(path):
            by_algo.setdefault(rec.algorithm, []).append(rec)
    reports = [evaluate(recs, truth) for recs in by_algo.values()]
    lines = [f"{'algorithm':<10} {'n':>6} {'pearson_r':>10} {'mae':>10}"]
    for rep in reports:
        lines.append(f"{rep.algorithm:<10} {rep.n_matched:>6d} {rep.pearson_r:>10.3f} {rep.mae:>10.3f}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        payload = [rep.to_dict() for rep in reports]
        args.out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="")
    return 0


def cmd_bench(args) -> int:
    workers = args.workers
    if workers is None:
        env = os.environ.get(THREADS_ENV)
        try:
            workers = _int_list(env) if env else [1]
        except argparse.ArgumentTypeError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not a worker count") from None
    algos = tuple(args.algo) if args.algo else ALGORITHMS
    config = BenchConfig(algorithms=tuple(dict.fromkeys(algos)), repeats=args.repeats,
                         worker_counts=tuple(workers), pipeline=_pipeline_config(args))
    manifests = [load_manifest(p) for p in args.manifests]
    truth = load_ground_truth(args.ground_truth) if args.ground_truth else None
    report = run_benchmark(manifests, config, truth)
    json_path, tsv_path = emit_report(report, args.out)
    lines = [f"{'algorithm':<10} {'median_us':>10} {'p95_us':>10}  fps by workers"]
    for a in report.algorithms.values():
        fps = " ".join(f"{p}:{v:.1f}" for p, v in a.fps.items())
        line = f"{a.algorithm:<10} {a.median_us:>10.1f} {a.p95_us:>10.1f}  {fps}"
        if a.accuracy:
            line += f"  r={a.accuracy.pearson_r:.3f}"
        lines.append(line)
    sys.stdout.write("\n".join(lines) + "\n")
    print(f"wrote {json_path} and {tsv_path}", file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    outdir = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for i in range(args.sequences):
        cam = args.camera_id if args.sequences == 1 else f"{args.camera_id}{i:02d}"
        cfg = SynthConfig(frames=args.frames, width=args.width, height=args.height,
                          cars=args.cars, noise=args.noise, seed=args.seed + i,
                          hold=args.hold, speed=args.speed, lam=args.lam, camera_id=cam)
        written.append(write_sequence(generate(cfg), outdir))
    for p in written:
        sys.stdout.write(f"{p}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="per-frame densities for one sequence")
    p.add_argument("manifest", type=Path)
    p.add_argument("--algo", choices=ALGORITHMS, default="mog")
    p.add_argument("--reference", type=Path, help="object-free reference image for staticbg")
    p.add_argument("--out", type=Path, help="output CSV (default stdout)")
    p.add_argument("--no-timing", action="store_true",
                   help="write elapsed_us as 0 so output is reproducible byte for byte")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="accuracy of density CSVs against ground truth")
    p.add_argument("densities", type=Path, nargs="+")
    p.add_argument("--ground-truth", type=Path, required=True)
    p.add_argument("--out", type=Path, help="write AccuracyReports as JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="timing, scalability and accuracy report")
    p.add_argument("manifests", type=Path, nargs="+")
    p.add_argument("--algo", choices=ALGORITHMS, action="append",
                   help="algorithm to include; repeatable (default: all)")
    p.add_argument("--workers", type=_int_list, help=f"comma-separated worker counts (default ${THREADS_ENV} or 1)")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--ground-truth", type=Path)
    p.add_argument("--out", type=Path, default=Path("bench_report.json"))
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a seeded synthetic sequence")
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--cars", type=_car_range, default=(0, 5), help="car count range, e.g. 0..5")
    p.add_argument("--noise", type=float, default=2.0, help="Gaussian noise sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", type=Path, required=True)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--hold", type=int, default=1, help="frames each car set persists")
    p.add_argument("--speed", type=float, default=0.0, help="car speed in px/frame while held")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--camera-id", default="cam0")
    p.add_argument("--sequences", type=int, default=1, help="number of cameras (seeds seed..seed+n-1)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bgbench: error: {exc}", file=sys.stderr)
        return 2
    except (BgBenchError, OSError, ValueError, RuntimeError) as exc:
        print(f"bgbench: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
