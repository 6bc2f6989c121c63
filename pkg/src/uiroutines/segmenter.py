"""Split a normalized log into segments delimited by back-edges.

A segment opens at a UI that is the target of a back-edge and closes at the
first later UI that is the source of a back-edge into the opening UI.
UIs met outside any segment are treated as noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from uiroutines.cfg import BackEdgeSet


@dataclass(frozen=True)
class Segment:
    start_index: int
    end_index: int  # inclusive
    uis: tuple

    def __len__(self):
        return self.end_index - self.start_index + 1

    @property
    def positions(self) -> range:
        return range(self.start_index, self.end_index + 1)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(getattr(u, "key", u) for u in self.uis)


@dataclass(frozen=True)
class SegmentationReport:
    segments: tuple[Segment, ...] = ()
    discarded_indices: tuple[int, ...] = ()
    open_tail: tuple[int, ...] = ()
    log_size: int = 0

    def with_open_tail_promoted(self, nlog: Sequence) -> SegmentationReport:
        """Report where an unterminated final segment counts as a segment."""
        if not self.open_tail:
            return self
        start, end = self.open_tail[0], self.open_tail[-1]
        tail = Segment(start, end, tuple(nlog[start:end + 1]))
        return SegmentationReport(
            self.segments + (tail,), self.discarded_indices, (), self.log_size
        )

    def segment_ids(self) -> list[int | None]:
        """Segment number (0-based) of every log position, None outside segments."""
        ids: list[int | None] = [None] * self.log_size
        for sid, seg in enumerate(self.segments):
            for i in seg.positions:
                ids[i] = sid
        return ids


def identify_segments(nlog: Sequence, back_edges: BackEdgeSet, headers_only: bool = False
                      ) -> SegmentationReport:
    """Single left-to-right scan of ``nlog`` opening and closing segments.

    Every UI appended while inside a segment, the opening one included, is
    tested against the back-edges into the opening UI, so a self-loop
    back-edge yields a one-UI segment.
    """
    if headers_only:
        back_edges = back_edges.headers_only()
    keys = [getattr(u, "key", u) for u in nlog]
    starts = back_edges.targets()
    closes = back_edges.edges

    segments = []
    discarded = []
    opened_at = None
    for i, k in enumerate(keys):
        if opened_at is None:
            if k not in starts:
                discarded.append(i)
                continue
            opened_at = i
        if (k, keys[opened_at]) in closes:
            segments.append(Segment(opened_at, i, tuple(nlog[opened_at:i + 1])))
            opened_at = None
    tail = tuple(range(opened_at, len(keys))) if opened_at is not None else ()
    return SegmentationReport(tuple(segments), tuple(discarded), tail, len(keys))
