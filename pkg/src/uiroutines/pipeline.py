"""End-to-end orchestration: parse, preprocess, normalize, segment, mine.

Stages exchange plain in-memory results; :mod:`uiroutines.io` turns them
into report files. Each stage is timed.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping

from uiroutines import cfg as cfgmod
from uiroutines.errors import ConfigError, ParameterError, RoutineError
from uiroutines.mining import CRITERIA, RoutineCandidate, check_min_support, extract_routines
from uiroutines.preprocess import (
    DEFAULT_CATEGORIES,
    RedundancyRule,
    RemovalReport,
    apply_rules,
    default_rules,
)
from uiroutines.segmenter import SegmentationReport, identify_segments
from uiroutines.uilog import ContextSchema, LogFormat, NormalizedUI, UILog, normalize, normalize_ui

COVERAGE_BASES = ("full", "segments")


@dataclass
class PipelineConfig:
    schema: ContextSchema = field(default_factory=ContextSchema)
    log_format: LogFormat = field(default_factory=LogFormat)
    preprocess: bool = True
    rules: list[RedundancyRule] = field(default_factory=default_rules)
    categories: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(DEFAULT_CATEGORIES))
    min_support: float = 0.1
    min_length: int = 1
    criterion: str = "cohesion"
    coverage_base: str = "full"
    keep_open_tail: bool = False
    headers_only: bool = False
    path_budget: int = cfgmod.DEFAULT_PATH_BUDGET

    def validate(self) -> PipelineConfig:
        check_min_support(self.min_support)
        if not isinstance(self.min_length, int) or self.min_length < 1:
            raise ParameterError(f"min_length must be an integer >= 1, got {self.min_length!r}")
        if self.criterion not in CRITERIA:
            raise ParameterError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.coverage_base not in COVERAGE_BASES:
            raise ParameterError(f"coverage_base must be one of {COVERAGE_BASES}")
        if self.path_budget < 1:
            raise ParameterError("path_budget must be >= 1")
        return self

    def to_dict(self) -> dict:
        fmt = self.log_format
        return {
            **self.schema.to_dict(),
            "format": {
                "timestamp_column": fmt.timestamp_column,
                "type_column": fmt.type_column,
                "timestamp_format": fmt.timestamp_format,
                "missing_values": sorted(fmt.missing_values),
            },
            "preprocess": {
                "enabled": self.preprocess,
                "categories": {k: list(v) for k, v in self.categories.items()},
                "rules": [r.to_dict() for r in self.rules],
            },
            "segmentation": {
                "keep_open_tail": self.keep_open_tail,
                "headers_only": self.headers_only,
                "path_budget": self.path_budget,
            },
            "mining": {
                "min_support": self.min_support,
                "min_length": self.min_length,
                "criterion": self.criterion,
                "coverage_base": self.coverage_base,
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> PipelineConfig:
        known = {"context", "default_context", "format", "preprocess", "segmentation", "mining"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        out = cls(schema=ContextSchema.from_dict(data))
        fmt = data.get("format", {})
        out.log_format = LogFormat(
            timestamp_column=fmt.get("timestamp_column", "Timestamp"),
            type_column=fmt.get("type_column", "Type"),
            timestamp_format=fmt.get("timestamp_format"),
            missing_values=frozenset(fmt.get("missing_values", LogFormat().missing_values)),
        )
        pre = data.get("preprocess", {})
        out.preprocess = bool(pre.get("enabled", True))
        if "categories" in pre:
            out.categories = {k: tuple(v) for k, v in pre["categories"].items()}
        if "rules" in pre:
            out.rules = [RedundancyRule.from_dict(r) for r in pre["rules"]]
        seg = data.get("segmentation", {})
        out.keep_open_tail = bool(seg.get("keep_open_tail", False))
        out.headers_only = bool(seg.get("headers_only", False))
        out.path_budget = int(seg.get("path_budget", cfgmod.DEFAULT_PATH_BUDGET))
        mining = data.get("mining", {})
        out.min_support = mining.get("min_support", out.min_support)
        out.min_length = mining.get("min_length", out.min_length)
        out.criterion = mining.get("criterion", out.criterion)
        out.coverage_base = mining.get("coverage_base", out.coverage_base)
        return out.validate()

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path) -> PipelineConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def updated(self, **overrides) -> PipelineConfig:
        names = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in overrides.items() if k in names and v is not None})


class StageError(RoutineError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


class Timer:
    def __init__(self):
        self.seconds: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except RoutineError as exc:
            if isinstance(exc, StageError):
                raise
            raise StageError(name, exc) from exc
        finally:
            self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - t0


@dataclass
class SegmentationResult:
    log: UILog  # after preprocessing
    nlog: list[NormalizedUI]
    removal: RemovalReport
    graph: cfgmod.Cfg
    dominators: cfgmod.DominatorTree
    back_edges: cfgmod.BackEdgeSet
    report: SegmentationReport
    timings: dict[str, float]

    def rows(self) -> list[int]:
        """Original row index of every position of the normalized log."""
        return [ui.row for ui in self.log]

    def segment_rows(self) -> list[list[int]]:
        rows = self.rows()
        return [[rows[i] for i in s.positions] for s in self.report.segments]


def segment_log(log: UILog, config: PipelineConfig,
                timer: Timer | None = None) -> SegmentationResult:
    timer = timer or Timer()
    config.validate()
    schema = config.schema
    removal = RemovalReport()
    if config.preprocess:
        with timer.stage("preprocess"):
            log, removal = apply_rules(
                log, config.rules, config.categories,
                target=lambda ui: normalize_ui(ui, schema).key,
            )
    with timer.stage("normalize"):
        nlog = normalize(log, schema)
    with timer.stage("cfg"):
        graph = cfgmod.build_cfg(nlog)
        dominators = cfgmod.compute_dominator_tree(graph)
    with timer.stage("back_edges"):
        back_edges = cfgmod.detect_back_edges(graph, config.path_budget)
    with timer.stage("segment"):
        report = identify_segments(nlog, back_edges, headers_only=config.headers_only)
        if config.keep_open_tail:
            report = report.with_open_tail_promoted(nlog)
    return SegmentationResult(log, nlog, removal, graph, dominators, back_edges, report,
                              timer.seconds)


@dataclass
class MiningResult:
    candidates: list[RoutineCandidate]
    coverage_total: int
    timings: dict[str, float]


def mine_segments(segments: list[tuple[str, ...]], positions: list[list[int]], log_size: int,
                  config: PipelineConfig, timer: Timer | None = None) -> MiningResult:
    """Extract routines from segment symbol lists whose symbols sit at ``positions``."""
    timer = timer or Timer()
    config.validate()
    total = log_size if config.coverage_base == "full" else sum(len(s) for s in segments)
    with timer.stage("mine"):
        if total <= 0:
            candidates = []
        else:
            candidates = extract_routines(
                segments, config.min_support, config.min_length, config.criterion,
                total, positions,
            )
    return MiningResult(candidates, total, timer.seconds)


@dataclass
class PipelineResult:
    segmentation: SegmentationResult
    mining: MiningResult
    timings: dict[str, float]


def run_pipeline(log: UILog, config: PipelineConfig) -> PipelineResult:
    timer = Timer()
    seg = segment_log(log, config, timer)
    symbols = [s.symbols for s in seg.report.segments]
    mining = mine_segments(symbols, seg.segment_rows(), len(seg.nlog), config, timer)
    return PipelineResult(seg, mining, timer.seconds)
