"""Command-line entry point: ``uiroutines {segment,mine,evaluate,generate,run}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from uiroutines import plotting, reports
from uiroutines.cfg import to_dot
from uiroutines.errors import RoutineError
from uiroutines.loggen import GeneratorSpec, generate, make_variants, read_truth, split_evenly
from uiroutines.metrics import evaluate
from uiroutines.mining import CRITERIA
from uiroutines.pipeline import (
    COVERAGE_BASES,
    PipelineConfig,
    Timer,
    mine_segments,
    segment_log,
)
from uiroutines.uilog import ContextSchema, LogFormat, parse_log

log = logging.getLogger("uiroutines")


class InputError(RoutineError):
    pass


def _read(path) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"input file not found: {path}")
    return p.read_text(encoding="utf-8")


def _write_all(out_dir: Path, files: dict[str, str]):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        target = out_dir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")


def _config(args) -> PipelineConfig:
    config = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
    if getattr(args, "default_context", None):
        config.schema = ContextSchema(config.schema.context_params, args.default_context)
    fmt = config.log_format
    if any(getattr(args, k, None) for k in ("timestamp_column", "type_column", "timestamp_format")):
        config.log_format = LogFormat(
            args.timestamp_column or fmt.timestamp_column,
            args.type_column or fmt.type_column,
            args.timestamp_format or fmt.timestamp_format,
            fmt.missing_values,
        )
    overrides = {
        "min_support": getattr(args, "min_support", None),
        "min_length": getattr(args, "min_length", None),
        "criterion": getattr(args, "criterion", None),
        "coverage_base": getattr(args, "coverage_base", None),
        "path_budget": getattr(args, "path_budget", None),
    }
    if getattr(args, "no_preprocess", False):
        overrides["preprocess"] = False
    if getattr(args, "keep_open_tail", False):
        overrides["keep_open_tail"] = True
    if getattr(args, "headers_only", False):
        overrides["headers_only"] = True
    return config.updated(**overrides).validate()


def _segmentation_files(seg, config) -> dict[str, str]:
    return {
        "segments.csv": reports.segments_csv(seg, config.log_format),
        "segmentation.json": reports.to_json(reports.segmentation_summary(seg)),
        "segmentation.txt": reports.segmentation_text(seg),
    }


def _mining_files(mining) -> dict[str, str]:
    return {
        "routines.csv": reports.routines_csv(mining.candidates),
        "occurrences.csv": reports.occurrences_csv(mining.candidates),
        "routines.json": reports.to_json(reports.routines_summary(mining)),
        "routines.txt": reports.routines_text(mining),
    }


def _evaluation(discovered_segments, routines, truth_text, log_size, jc_literal):
    truth = read_truth(truth_text)
    report = evaluate(discovered_segments, routines.symbols, routines.consumed, truth,
                      log_size, jc_literal=jc_literal)
    files = {
        "evaluation.json": reports.to_json(report.as_dict()),
        "evaluation.csv": reports.evaluation_csv(report),
        "evaluation.txt": reports.evaluation_text(report),
    }
    return report, files


def cmd_segment(args) -> int:
    text = _read(args.log)
    config = _config(args)
    seg = segment_log(_parse(text, config), config)
    files = _segmentation_files(seg, config)
    out = Path(args.out)
    _write_all(out, files)
    _dump_cfg(seg, args)
    if args.figures:
        plotting.segment_lengths(seg.report, out / "figures" / "segment_lengths.png")
    sys.stdout.write(files["segmentation.txt"])
    return 0


def _parse(text, config, timer=None):
    with (timer or Timer()).stage("parse"):
        return parse_log(text, config.log_format)


def _dump_cfg(seg, args):
    if getattr(args, "dump_cfg", None):
        path = Path(args.dump_cfg)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_dot(seg.graph, seg.dominators, seg.back_edges), encoding="utf-8")


def cmd_mine(args) -> int:
    discovered = reports.read_segments_csv(_read(args.segments))
    config = _config(args)
    mining = mine_segments(discovered.symbols, discovered.rows, discovered.log_size, config)
    files = _mining_files(mining)
    out = Path(args.out)
    _write_all(out, files)
    if args.figures:
        plotting.routine_coverage(mining.candidates, mining.coverage_total,
                                  out / "figures" / "routine_coverage.png")
    sys.stdout.write(files["routines.txt"])
    return 0


def cmd_evaluate(args) -> int:
    base = Path(args.discovered)
    segs = reports.read_segments_csv(_read(base / "segments.csv"))
    routines = reports.read_routines(_read(base / "routines.csv"), _read(base / "occurrences.csv"))
    report, files = _evaluation(segs.pairs(), routines, _read(args.truth), segs.log_size,
                                args.jc_literal)
    out = Path(args.out or base)
    _write_all(out, files)
    if args.figures:
        plotting.led_distribution(report.per_segment_led, out / "figures" / "led.png")
    sys.stdout.write(files["evaluation.txt"])
    return 0


def _generator_spec(args) -> GeneratorSpec:
    if args.spec:
        return GeneratorSpec.from_dict(json.loads(_read(args.spec)))
    variants, tasks, counts = [], [], []
    per_task = split_evenly(args.instances, args.tasks)
    for t in range(args.tasks):
        tag = "" if args.tasks == 1 else f"T{t + 1} "
        family = make_variants(
            args.variants, args.length, seed=args.seed + t,
            start=f"Click button:{tag}New Record", prefix=f"{tag}Field", end_label=f"{tag}Submit",
        )
        variants += family
        tasks += [t] * len(family)
        counts += split_evenly(per_task[t], len(family))
    return GeneratorSpec(variants, counts, args.composition, args.noise, args.seed, tasks)


def cmd_generate(args) -> int:
    spec = _generator_spec(args)
    gen = generate(spec)
    config = PipelineConfig(schema=gen.schema)
    _write_all(Path(args.out), {
        "log.csv": gen.csv_text,
        "truth.csv": gen.truth_csv,
        "config.json": config.dumps() + "\n",
        "spec.json": spec.to_json() + "\n",
    })
    print(f"{len(gen.steps)} interactions, {len(gen.truth.segments)} segments, "
          f"{len(spec.routine_variants)} variants -> {args.out}")
    return 0


def cmd_run(args) -> int:
    text = _read(args.log)
    truth_text = _read(args.truth) if args.truth else None
    config = _config(args)
    timer = Timer()
    seg = segment_log(_parse(text, config, timer), config, timer)
    mining = mine_segments([s.symbols for s in seg.report.segments], seg.segment_rows(),
                           len(seg.nlog), config, timer)
    files = {**_segmentation_files(seg, config), **_mining_files(mining)}
    evaluation = None
    if truth_text is not None:
        rows = seg.rows()
        pairs = [([rows[i] for i in s.positions], s.symbols) for s in seg.report.segments]
        routines = reports.DiscoveredRoutines([c.symbols for c in mining.candidates],
                                              [c.positions for c in mining.candidates])
        evaluation, eval_files = _evaluation(pairs, routines, truth_text, len(seg.nlog),
                                             args.jc_literal)
        files.update(eval_files)
    files["report.json"] = reports.to_json({
        "config": config.to_dict(),
        "segmentation": reports.segmentation_summary(seg),
        "routines": reports.routines_summary(mining),
        "evaluation": evaluation.as_dict() if evaluation else None,
        "timings": dict(timer.seconds),
    })
    out = Path(args.out)
    _write_all(out, files)
    _dump_cfg(seg, args)
    if args.figures:
        plotting.segment_lengths(seg.report, out / "figures" / "segment_lengths.png")
        plotting.routine_coverage(mining.candidates, mining.coverage_total,
                                  out / "figures" / "routine_coverage.png")
        if evaluation:
            plotting.led_distribution(evaluation.per_segment_led, out / "figures" / "led.png")
    sys.stdout.write(files["segmentation.txt"])
    sys.stdout.write(files["routines.txt"])
    if evaluation:
        sys.stdout.write(files["evaluation.txt"])
    for stage, secs in timer.seconds.items():
        print(f"time {stage:<12}{secs:.3f}s")
    return 0


def _add_log_options(p):
    p.add_argument("--config", help="JSON pipeline config (context schema, rules, parameters)")
    p.add_argument("--timestamp-column")
    p.add_argument("--type-column")
    p.add_argument("--timestamp-format", help="strptime format; default ISO-8601")
    p.add_argument("--default-context", choices=("error", "all", "none"),
                   help="context of ui_types missing from the schema")
    p.add_argument("--no-preprocess", action="store_true", help="skip redundant-UI removal")
    p.add_argument("--keep-open-tail", action="store_true",
                   help="count an unterminated final segment as a segment")
    p.add_argument("--headers-only", action="store_true",
                   help="delimit segments with header back-edges only")
    p.add_argument("--path-budget", type=int,
                   help="largest component searched exactly for the deepest loop-edge")
    p.add_argument("--dump-cfg", metavar="PATH", help="write the CFG and dominator tree as DOT")


def _add_mining_options(p):
    if not any(a.dest == "config" for a in p._actions):
        p.add_argument("--config", help="JSON pipeline config")
    p.add_argument("--min-support", type=float, help="fraction of segments (default 0.1)")
    p.add_argument("--min-length", type=int, help="shortest routine reported (default 1)")
    p.add_argument("--criterion", choices=CRITERIA, help="ranking criterion (default cohesion)")
    p.add_argument("--coverage-base", choices=COVERAGE_BASES,
                   help="coverage denominator: whole log or segmented part (default full)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uiroutines", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="split a UI log into segments")
    p.add_argument("log")
    p.add_argument("-o", "--out", default="out")
    p.add_argument("--figures", action="store_true")
    _add_log_options(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("mine", help="extract routines from a segments.csv")
    p.add_argument("segments")
    p.add_argument("-o", "--out", default="out")
    p.add_argument("--figures", action="store_true")
    _add_mining_options(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("evaluate", help="score a run directory against ground truth")
    p.add_argument("discovered", help="directory with segments.csv, routines.csv, occurrences.csv")
    p.add_argument("truth", help="ground-truth CSV")
    p.add_argument("-o", "--out", help="output directory (default: the discovered directory)")
    p.add_argument("--jc-literal", action="store_true",
                   help="shared UIs over summed routine lengths instead of multiset Jaccard")
    p.add_argument("--figures", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="write a synthetic log with ground truth")
    p.add_argument("-o", "--out", default="generated")
    p.add_argument("--spec", help="JSON generator spec; overrides the shape flags")
    p.add_argument("--variants", type=int, default=1, help="variants per task")
    p.add_argument("--length", type=int, default=14, help="steps of the base variant")
    p.add_argument("--instances", type=int, default=100, help="instances in total")
    p.add_argument("--tasks", type=int, default=1)
    p.add_argument("--composition", choices=("single", "concatenated", "interleaved"),
                   default="single")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="full pipeline: segment, mine and optionally evaluate")
    p.add_argument("log")
    p.add_argument("-o", "--out", default="out")
    p.add_argument("--truth", help="ground-truth CSV to evaluate against")
    p.add_argument("--jc-literal", action="store_true")
    p.add_argument("--figures", action="store_true")
    _add_log_options(p)
    _add_mining_options(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RoutineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
