"""Report files exchanged between subcommands.

``segments.csv``
    every UI of the (preprocessed) log with its original columns plus
    ``row`` (index in the parsed log), ``position`` (index after
    preprocessing), ``symbol`` (normalized key), ``segment_id`` (blank
    outside segments) and ``status`` (``segment``, ``discarded`` or
    ``open_tail``).
``routines.csv``
    one row per candidate: ``rank, criterion, score, support_count,
    support, length, symbols`` where ``symbols`` is a JSON list.
``occurrences.csv``
    one row per (candidate, segment): ``rank, segment_id, window,
    consumed``; both are JSON lists of ``row`` values. ``window`` is the
    leftmost minimal window, ``consumed`` every UI removed from the segment.
``evaluation.csv``
    the table-like rows of an :class:`~uiroutines.metrics.EvaluationReport`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from uiroutines.errors import ParameterError
from uiroutines.metrics import EvaluationReport
from uiroutines.mining import RoutineCandidate
from uiroutines.pipeline import MiningResult, SegmentationResult
from uiroutines.uilog import LogFormat

SEGMENT_EXTRA_COLUMNS = ("row", "position", "symbol", "segment_id", "status")
ROUTINE_COLUMNS = ("rank", "criterion", "score", "support_count", "support", "length", "symbols")
OCCURRENCE_COLUMNS = ("rank", "segment_id", "window", "consumed")


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def segments_csv(seg: SegmentationResult, fmt: LogFormat | None = None) -> str:
    fmt = fmt or LogFormat()
    fmt_cols = (fmt.timestamp_column, fmt.type_column)
    params = seg.log.param_columns
    report = seg.report
    ids = report.segment_ids()
    tail = set(report.open_tail)
    rows = []
    for pos, (ui, nui) in enumerate(zip(seg.log, seg.nlog)):
        sid = ids[pos]
        status = "segment" if sid is not None else ("open_tail" if pos in tail else "discarded")
        rows.append([
            ui.timestamp.isoformat(), ui.ui_type, *(ui.params.get(p, "") for p in params),
            ui.row, pos, nui.key, "" if sid is None else sid, status,
        ])
    return _csv(rows, (*fmt_cols, *params, *SEGMENT_EXTRA_COLUMNS))


@dataclass
class DiscoveredSegments:
    rows: list[list[int]]
    symbols: list[tuple[str, ...]]
    log_size: int

    def pairs(self):
        return list(zip(self.rows, self.symbols))


def read_segments_csv(text: str) -> DiscoveredSegments:
    reader = csv.DictReader(io.StringIO(text))
    missing = {"row", "symbol", "segment_id"} - set(reader.fieldnames or ())
    if missing:
        raise ParameterError(f"segments CSV lacks columns {sorted(missing)}")
    by_id: dict[int, tuple[list, list]] = {}
    size = 0
    for rec in reader:
        size += 1
        if rec["segment_id"] == "":
            continue
        rows, syms = by_id.setdefault(int(rec["segment_id"]), ([], []))
        rows.append(int(rec["row"]))
        syms.append(rec["symbol"])
    ordered = [by_id[k] for k in sorted(by_id)]
    return DiscoveredSegments([r for r, _ in ordered], [tuple(s) for _, s in ordered], size)


def segmentation_summary(seg: SegmentationResult) -> dict:
    r = seg.report
    lengths = [len(s) for s in r.segments]
    return {
        "log_size": r.log_size,
        "removed_by_preprocessing": seg.removal.as_dict(),
        "vertices": len(seg.graph.vertices),
        "edges": len(seg.graph.edges),
        "back_edges": [
            {"source": a, "target": b, "origin": o} for (a, b), o in seg.back_edges.origin.items()
        ],
        "segments": len(r.segments),
        "segment_length_mean": (sum(lengths) / len(lengths)) if lengths else None,
        "discarded": len(r.discarded_indices),
        "open_tail": len(r.open_tail),
        "timings": dict(seg.timings),
    }


def segmentation_text(seg: SegmentationResult) -> str:
    s = segmentation_summary(seg)
    lines = [
        f"log size          {s['log_size']}",
        f"removed (preproc) {sum(len(v) for v in s['removed_by_preprocessing'].values())}",
        f"cfg               {s['vertices']} vertices, {s['edges']} edges",
        f"back-edges        {len(s['back_edges'])}",
    ]
    for be in s["back_edges"]:
        lines.append(f"  {be['source']} -> {be['target']}  ({be['origin']})")
    lines += [
        f"segments          {s['segments']}",
        f"discarded UIs     {s['discarded']}",
        f"open tail UIs     {s['open_tail']}",
    ]
    return "\n".join(lines) + "\n"


def routines_csv(candidates: list[RoutineCandidate]) -> str:
    rows = [
        [c.rank, c.criterion, repr(c.score), c.pattern.support_count, repr(c.pattern.support),
         len(c.symbols), json.dumps(list(c.symbols), ensure_ascii=False)]
        for c in candidates
    ]
    return _csv(rows, ROUTINE_COLUMNS)


def occurrences_csv(candidates: list[RoutineCandidate]) -> str:
    rows = []
    for c in candidates:
        for sid in sorted(c.consumed):
            rows.append([c.rank, sid, json.dumps(list(c.pattern.occurrences.get(sid, ()))),
                         json.dumps(list(c.consumed[sid]))])
    return _csv(rows, OCCURRENCE_COLUMNS)


@dataclass
class DiscoveredRoutines:
    symbols: list[tuple[str, ...]]
    consumed: list[list[int]]  # per routine, every consumed row


def read_routines(routines_text: str, occurrences_text: str) -> DiscoveredRoutines:
    ranks = {}
    for rec in csv.DictReader(io.StringIO(routines_text)):
        ranks[int(rec["rank"])] = tuple(json.loads(rec["symbols"]))
    consumed: dict[int, list[int]] = {r: [] for r in ranks}
    for rec in csv.DictReader(io.StringIO(occurrences_text)):
        consumed.setdefault(int(rec["rank"]), []).extend(json.loads(rec["consumed"]))
    order = sorted(ranks)
    return DiscoveredRoutines([ranks[r] for r in order], [sorted(consumed[r]) for r in order])


def routines_summary(mining: MiningResult) -> dict:
    cands = mining.candidates
    covered = {p for c in cands for p in c.positions}
    return {
        "criterion": cands[0].criterion if cands else None,
        "routines": [
            {
                "rank": c.rank,
                "score": c.score,
                "support_count": c.pattern.support_count,
                "support": c.pattern.support,
                "length": len(c.symbols),
                "symbols": list(c.symbols),
                "occurrences": {str(k): list(v) for k, v in c.pattern.occurrences.items()},
            }
            for c in cands
        ],
        "coverage_denominator": mining.coverage_total,
        "total_coverage": len(covered) / mining.coverage_total if mining.coverage_total else 0.0,
        "timings": dict(mining.timings),
    }


def routines_text(mining: MiningResult) -> str:
    s = routines_summary(mining)
    lines = [f"routines          {len(s['routines'])}",
             f"total coverage    {s['total_coverage']:.3f}"]
    for r in s["routines"]:
        lines.append(
            f"#{r['rank']:<3} score={r['score']:.4g} support={r['support_count']} "
            f"({r['support']:.3f}) length={r['length']}"
        )
        for sym in r["symbols"]:
            lines.append(f"      {sym}")
    return "\n".join(lines) + "\n"


def _fmt(x):
    if not isinstance(x, float):
        return str(x)
    return "nan" if math.isnan(x) else f"{x:.3f}"


def evaluation_csv(report: EvaluationReport) -> str:
    header = ("original_segments", "discovered_segments", "led_avg", "discovered_routines",
              "routine_length", "total_coverage", "jc")
    row = [report.truth_segments, report.discovered_segments, _fmt(report.avg_led),
           report.discovered_routines, _fmt(report.avg_routine_length),
           _fmt(report.total_coverage), _fmt(report.avg_jc)]
    return _csv([row], header)


def evaluation_text(report: EvaluationReport) -> str:
    jc = "JC (literal)" if report.jc_literal else "JC"
    return "\n".join([
        f"segments          {report.discovered_segments} discovered"
        f" / {report.truth_segments} original",
        f"LED (avg)         {_fmt(report.avg_led)}",
        f"routines          {report.discovered_routines} discovered"
        f" / {report.truth_routines} original",
        f"routine length    {_fmt(report.avg_routine_length)}",
        f"total coverage    {_fmt(report.total_coverage)}",
        f"{jc:<18}{_fmt(report.avg_jc)}",
    ]) + "\n"


def to_json(data) -> str:
    def default(o):
        raise TypeError(f"not serializable: {type(o).__name__}")

    def clean(o):
        if isinstance(o, float) and math.isnan(o):
            return None
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(data), indent=2, ensure_ascii=False, default=default) + "\n"
