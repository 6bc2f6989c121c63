"""Quality measures for segmentation and routine discovery."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from statistics import fmean
from typing import Iterable, Sequence


def levenshtein(a: Sequence, b: Sequence) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def normalized_led(a: Sequence, b: Sequence) -> float:
    """Edit distance over symbols divided by the longer length (0 for two empties)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def jaccard(a: Sequence, b: Sequence) -> float:
    """Multiset Jaccard coefficient; order of symbols is ignored."""
    ca, cb = Counter(a), Counter(b)
    union = sum((ca | cb).values())
    if union == 0:
        return 1.0
    return sum((ca & cb).values()) / union


def jaccard_literal(a: Sequence, b: Sequence) -> float:
    """Shared symbols over the summed lengths; identical routines score 0.5."""
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return sum((Counter(a) & Counter(b)).values()) / total


@dataclass(frozen=True)
class TruthSegment:
    positions: tuple[int, ...]
    symbols: tuple[str, ...]
    routine_id: str | None = None


@dataclass(frozen=True)
class GroundTruth:
    segments: tuple[TruthSegment, ...] = ()
    routines: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        seen: set[int] = set()
        for seg in self.segments:
            if seen.intersection(seg.positions):
                raise ValueError("ground-truth segments overlap")
            seen.update(seg.positions)


def segmentation_quality(discovered: Iterable[tuple[Sequence[int], Sequence[str]]],
                         truth: GroundTruth) -> tuple[float, list[float]]:
    """Average over discovered segments of the best LED to an overlapping truth segment.

    ``discovered`` yields (log positions, symbols) pairs. A discovered
    segment sharing no position with any truth segment scores 1.0.
    """
    owner = {}
    for ti, seg in enumerate(truth.segments):
        for p in seg.positions:
            owner[p] = ti
    per = []
    for positions, syms in discovered:
        candidates = {owner[p] for p in positions if p in owner}
        if not candidates:
            per.append(1.0)
            continue
        per.append(min(normalized_led(syms, truth.segments[t].symbols) for t in sorted(candidates)))
    return (fmean(per) if per else math.nan), per


def routine_quality(discovered: Iterable[Sequence[str]], truth: GroundTruth,
                    literal: bool = False) -> tuple[float, list[float]]:
    """Average over discovered routines of the best Jaccard against a truth routine."""
    measure = jaccard_literal if literal else jaccard
    per = [max((measure(r, t) for t in truth.routines), default=0.0) for r in discovered]
    return (fmean(per) if per else math.nan), per


def total_coverage(candidates, log_size: int) -> float:
    """Distinct log positions consumed by the candidates, over ``log_size``."""
    if log_size <= 0:
        return 0.0
    covered = set()
    for c in candidates:
        covered.update(c.positions)
    return len(covered) / log_size


def average_routine_length(routines: Iterable[Sequence]) -> float:
    lengths = [len(r) for r in routines]
    return fmean(lengths) if lengths else math.nan


@dataclass
class EvaluationReport:
    avg_led: float
    per_segment_led: list[float]
    avg_jc: float
    per_routine_jc: list[float]
    total_coverage: float
    avg_routine_length: float
    discovered_segments: int
    truth_segments: int
    discovered_routines: int
    truth_routines: int
    jc_literal: bool = False
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)

    def table_rows(self) -> list[dict]:
        """Rows shaped like the segmentation and routine results tables."""
        return [
            {
                "table": "segmentation",
                "original_segments": self.truth_segments,
                "discovered_segments": self.discovered_segments,
                "led_avg": self.avg_led,
            },
            {
                "table": "routines",
                "discovered_routines": self.discovered_routines,
                "routine_length": self.avg_routine_length,
                "total_coverage": self.total_coverage,
                "jc": self.avg_jc,
            },
        ]


class _Positions:
    def __init__(self, positions):
        self.positions = positions


def evaluate(discovered_segments, discovered_routines, routine_positions, truth: GroundTruth,
             log_size: int, jc_literal: bool = False) -> EvaluationReport:
    """Score a full run.

    ``discovered_segments``: (positions, symbols) pairs.
    ``discovered_routines``: symbol sequences.
    ``routine_positions``: per routine, the log positions it consumed.
    """
    discovered_segments = list(discovered_segments)
    discovered_routines = [tuple(r) for r in discovered_routines]
    led, per_led = segmentation_quality(discovered_segments, truth)
    jc, per_jc = routine_quality(discovered_routines, truth, literal=jc_literal)
    cov = total_coverage([_Positions(p) for p in routine_positions], log_size)
    return EvaluationReport(
        avg_led=led,
        per_segment_led=per_led,
        avg_jc=jc,
        per_routine_jc=per_jc,
        total_coverage=cov,
        avg_routine_length=average_routine_length(discovered_routines),
        discovered_segments=len(discovered_segments),
        truth_segments=len(truth.segments),
        discovered_routines=len(discovered_routines),
        truth_routines=len(truth.routines),
        jc_literal=jc_literal,
    )
