"""Command line interface: ``sensorconflict <command> [options]``."""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .conflict import DEFAULT_MAX_SOURCES, build_lattice
from .evidence import EvidenceFrame, WindowSpec, evidence_frames
from .evaluation import run_scenario, synthetic_sources, window_sweep
from .exceptions import ConflictFusionError
from .fusion import AXES, fuse_interval, fuse_series, fuse_trajectories, sum_conflicts, weights
from .noise import NoiseSpec, derive_noisy_source, preset

log = logging.getLogger("sensorconflict")

DEMO_INTERVALS = [(0, 10), (2, 8), (3, 7), (4, 6)]
DEMO_EXPECTED = {
    "triple": ((1, 2, 3), 0.3333, 1e-4),
    "sumc": ((0.9625, 0.8180, 0.8486, 1.0042), 5e-4),
    "weights": ((0.2342, 0.2756, 0.2657, 0.2245), 5e-4),
    "fused": ((2.2462, 7.7538), 1e-3),
}


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _dump_json(obj, fh):
    json.dump(obj, fh, indent=2)
    fh.write("\n")


def _window_spec(args) -> WindowSpec:
    return WindowSpec(args.window, args.stride, args.sigma_mult)


def _parse_subset(text: str) -> tuple:
    try:
        members = tuple(int(v) for v in text.replace("{", "").replace("}", "").split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"subset must look like '1,4', got {text!r}") from None
    if not members:
        raise argparse.ArgumentTypeError("subset cannot be empty")
    return members


def _parse_lengths(text: str) -> list:
    try:
        if ":" in text:
            lo, hi = (int(v) for v in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"lengths must be 'a:b' or 'a,b,c', got {text!r}") from None


def _load_columns(path, axis):
    """Return ``(t, columns, names)`` from either input format."""
    if csvio.sniff_format(path) == "trajectory":
        t, trajs = csvio.ingest_trajectory_csv(path)
        return t, np.column_stack([tr.axis(axis) for tr in trajs]), [tr.label for tr in trajs]
    t, series = csvio.ingest_scalar_csv(path)
    return t, np.column_stack([s.values for s in series]), [s.label for s in series]


def cmd_demo(args) -> int:
    frame = EvidenceFrame.from_intervals(DEMO_INTERVALS)
    lattice = build_lattice(frame)
    sumc = sum_conflicts(lattice)
    w = weights(sumc, 1)
    fused = fuse_interval(frame, w)
    out = sys.stdout
    print("intervals: " + ", ".join(f"x{j}=[{lo}, {hi}]" for j, (lo, hi) in enumerate(DEMO_INTERVALS, 1)), file=out)
    print("conflict lattice:", file=out)
    for s in lattice.subsets():
        print(f"  g{str(s):<16} = {lattice[s]:.5f}", file=out)
    print("SumC:    " + " ".join(f"{v:.4f}" for v in sumc), file=out)
    print("weights: " + " ".join(f"{v:.4f}" for v in w.weights), file=out)
    print(f"fused interval: [{fused.lo:.4f}, {fused.hi:.4f}]", file=out)

    failures = []
    subset, value, tol = DEMO_EXPECTED["triple"]
    if abs(lattice[subset] - value) > tol:
        failures.append(f"g{subset} = {lattice[subset]} != {value}")
    for key, got in (("sumc", sumc), ("weights", w.weights), ("fused", (fused.lo, fused.hi))):
        expected, tol = DEMO_EXPECTED[key]
        if np.max(np.abs(np.asarray(got) - expected)) > tol:
            failures.append(f"{key} = {[round(float(v), 6) for v in got]} != {list(expected)}")
    for f in failures:
        log.error("self-check failed: %s", f)
    if failures:
        return 1
    print("self-check: ok", file=out)
    return 0


def cmd_conflict(args) -> int:
    _, columns, _ = _load_columns(args.input, args.axis)
    series = [csvio.SampleSeries(j + 1, columns[:, j]) for j in range(columns.shape[1])]
    frames = evidence_frames(series, _window_spec(args))
    rows = []
    for frame in frames:
        try:
            lattice = build_lattice(frame, args.max_sources)
        except ConflictFusionError as exc:
            raise ConflictFusionError(f"window {frame.window_start}: {exc}") from exc
        for s in lattice.subsets():
            rows.append((frame.window_start, s.mask, " ".join(map(str, s.members)), lattice[s]))
    with _output(args.output) as fh:
        if args.format == "json":
            _dump_json(
                [{"window_start": r[0], "mask": r[1], "members": [int(m) for m in r[2].split()], "conflict": r[3]} for r in rows],
                fh,
            )
        else:
            csvio.write_rows(fh, ["window_start", "mask", "members", "conflict"], rows)
    log.info("%d windows, %d subsets each", len(frames), 2 ** columns.shape[1] - 1)
    return 0


def _weight_rows(records, axis=None):
    for frame, _, w in records:
        yield ([axis] if axis else []) + [frame.window_start, *w.weights.tolist()]


def cmd_fuse(args) -> int:
    spec = _window_spec(args)
    if csvio.sniff_format(args.input) == "trajectory":
        t, trajs = csvio.ingest_trajectory_csv(args.input)
        fused, diagnostics = fuse_trajectories(trajs, spec, args.exponent, args.weighting, args.max_sources)
        weight_rows = [[d.axis, d.window_start, *d.weights.tolist()] for d in diagnostics]
        weight_header = ["axis", "window_start"] + [f"w{j}" for j in range(1, len(trajs) + 1)]
        if args.format == "json":
            payload = {
                "t": t.tolist(),
                "fused": {a: fused.axis(a).tolist() for a in AXES},
                "weights_per_window": [dict(zip(weight_header, r)) for r in weight_rows],
            }
        else:
            body = csvio.to_text(csvio.write_trajectory_csv, t, [fused])
    else:
        t, columns, names = _load_columns(args.input, None)
        fused, _, records = fuse_series(columns, spec, args.exponent, args.weighting, args.max_sources)
        weight_rows = list(_weight_rows(records))
        weight_header = ["window_start"] + [f"w{j}" for j in range(1, columns.shape[1] + 1)]
        if args.format == "json":
            payload = {
                "t": t.tolist(),
                "fused": fused.tolist(),
                "weights_per_window": [dict(zip(weight_header, r)) for r in weight_rows],
            }
        else:
            body = csvio.to_text(csvio.write_scalar_csv, t, {"fused": fused})
    with _output(args.output) as fh:
        if args.format == "json":
            _dump_json(payload, fh)
        else:
            fh.write(body)
    if args.weights_output and args.format != "json":
        with _output(args.weights_output) as fh:
            csvio.write_rows(fh, weight_header, weight_rows)
    return 0


def _noise_spec(args) -> NoiseSpec:
    if args.preset:
        return preset(args.preset, args.seed)
    axes = tuple(args.axes) if args.axes else None
    if args.kind == "impulse":
        return NoiseSpec("impulse", axes=axes or ("z",), count=args.count, magnitude=args.magnitude, seed=args.seed, sign=args.sign)
    if args.kind == "dc":
        return NoiseSpec("dc", axes=axes or ("z",), offset=args.offset, seed=args.seed)
    if args.kind == "gaussian":
        return NoiseSpec("gaussian", axes=axes or AXES, snr_db=args.snr_db, seed=args.seed, power=args.power)
    raise ConflictFusionError("give --preset or --kind")


def inject(trajs, spec: NoiseSpec, source_label: str, replace: bool = False, new_label=None):
    """Corrupt the trajectory labelled ``source_label``; append or replace it."""
    base = next((tr for tr in trajs if tr.label == source_label), None)
    if base is None:
        raise ConflictFusionError(f"no source labelled {source_label!r}; have {[tr.label for tr in trajs]}")
    if replace:
        noisy = derive_noisy_source(base, spec, base.source_id).replace(label=base.label)
        return [noisy if tr is base else tr for tr in trajs]
    label = new_label or f"{source_label}_{spec.kind}"
    if any(tr.label == label for tr in trajs):
        raise ConflictFusionError(f"source label {label!r} already exists")
    noisy = derive_noisy_source(base, spec, len(trajs) + 1).replace(label=label)
    return [*trajs, noisy]


def cmd_inject(args) -> int:
    t, trajs = csvio.ingest_trajectory_csv(args.input)
    out = inject(trajs, _noise_spec(args), args.source, args.replace, args.new_src)
    with _output(args.output) as fh:
        csvio.write_trajectory_csv(fh, t, out)
    return 0


def cmd_eval(args) -> int:
    if args.input:
        _, clean = csvio.ingest_trajectory_csv(args.input)
    else:
        clean = synthetic_sources(3, args.length, args.seed)
    report = run_scenario(
        clean,
        _noise_spec(args),
        _window_spec(args),
        args.exponent,
        args.reference_source,
        args.corrupt_source,
        args.weighting,
        scenario=args.preset or args.kind,
        max_sources=args.max_sources,
    )
    with _output(args.output) as fh:
        if args.format == "csv":
            rows = [(m, a, v) for m, per in report.metrics.items() for a, v in per.items()]
            csvio.write_rows(fh, ["method", "axis", "D"], rows)
        else:
            _dump_json(report.to_dict(), fh)
    for a in report.metrics["proposed"]:
        log.info("D_%s: average %.4f proposed %.4f", a, report.metrics["average"][a], report.metrics["proposed"][a])
    return 0


def cmd_sweep(args) -> int:
    if args.input:
        _, columns, _ = _load_columns(args.input, args.axis)
    else:
        clean = synthetic_sources(4, args.length, args.seed)
        columns = np.column_stack([tr.axis(args.axis) for tr in clean])
    series = [csvio.SampleSeries(j + 1, columns[:, j]) for j in range(columns.shape[1])]
    result = window_sweep(series, args.lengths, args.subset, args.sigma_mult)
    with _output(args.output) as fh:
        if args.format == "json":
            _dump_json({"subset": list(result.subset), "rows": [list(r) for r in result.rows]}, fh)
        else:
            csvio.write_rows(fh, ["window", "mean", "std"], result.rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensorconflict", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--window", type=int, default=10, help="samples per window (default 10)")
    common.add_argument("--stride", type=int, default=1)
    common.add_argument("--sigma-mult", type=float, default=3.0, help="interval half-width in std devs")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-sources", type=int, default=DEFAULT_MAX_SOURCES)
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    fusing = argparse.ArgumentParser(add_help=False)
    fusing.add_argument("--weighting", choices=("window", "global"), default="window")

    noise = argparse.ArgumentParser(add_help=False)
    noise.add_argument("--preset", choices=("impulse", "dc", "gaussian"))
    noise.add_argument("--kind", choices=("impulse", "dc", "gaussian"))
    noise.add_argument("--axes", default=None, help="e.g. 'z' or 'xyz'")
    noise.add_argument("--count", type=int)
    noise.add_argument("--magnitude", type=float)
    noise.add_argument("--sign", type=int, choices=(1, -1), default=1)
    noise.add_argument("--offset", type=float)
    noise.add_argument("--snr-db", type=float)
    noise.add_argument("--power", choices=("ac", "raw"), default="ac")

    p = sub.add_parser("demo", help="replay the four-interval worked example with self-check")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("conflict", parents=[common], help="per-window conflict lattice")
    p.add_argument("input")
    p.add_argument("--axis", choices=AXES, default="z", help="axis for trajectory input")
    p.set_defaults(func=cmd_conflict, default_format="csv")

    p = sub.add_parser("fuse", parents=[common, fusing], help="conflict-weighted fusion")
    p.add_argument("input")
    p.add_argument("--exponent", type=int, default=1)
    p.add_argument("--weights-output", default=None, help="per-window weights CSV")
    p.set_defaults(func=cmd_fuse, default_format="csv")

    p = sub.add_parser("inject", parents=[common, noise], help="write a corrupted copy of a trajectory file")
    p.add_argument("input")
    p.add_argument("--source", default="2", help="src label to corrupt (default 2)")
    p.add_argument("--new-src", default=None, help="label of the appended noisy source")
    p.add_argument("--replace", action="store_true", help="overwrite the source instead of appending")
    p.set_defaults(func=cmd_inject, default_format="csv")

    p = sub.add_parser("eval", parents=[common, fusing, noise], help="average vs conflict-weighted fusion")
    p.add_argument("input", nargs="?", help="clean trajectory CSV (default: synthetic)")
    p.add_argument("--exponent", type=int, default=3)
    p.add_argument("--reference-source", type=int, default=1)
    p.add_argument("--corrupt-source", type=int, default=2)
    p.add_argument("--length", type=int, default=600, help="synthetic record length")
    p.set_defaults(func=cmd_eval, default_format="json")

    p = sub.add_parser("sweep", parents=[common], help="conflict mean/std versus window length")
    p.add_argument("input", nargs="?", help="scalar or trajectory CSV (default: synthetic)")
    p.add_argument("--lengths", type=_parse_lengths, default=list(range(2, 31)))
    p.add_argument("--subset", type=_parse_subset, default=(1, 4))
    p.add_argument("--axis", choices=AXES, default="z")
    p.add_argument("--length", type=int, default=600, help="synthetic record length")
    p.set_defaults(func=cmd_sweep, default_format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    if getattr(args, "format", None) is None and hasattr(args, "default_format"):
        args.format = args.default_format
    try:
        return args.func(args)
    except (ConflictFusionError, ValueError, KeyError, OSError) as exc:
        where = f" ({args.input})" if getattr(args, "input", None) else ""
        log.error("%s%s: %s", args.command, where, exc)
        return 1
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
