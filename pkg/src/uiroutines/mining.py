"""Closed sequential pattern mining and greedy routine extraction.

Patterns are gapped subsequences counted once per segment. Closed patterns
are mined depth-first over pseudo-projected databases; a prefix is closed
when no single symbol can be appended or inserted without losing support,
and a prefix is pruned when some symbol can be inserted before it in every
supporting segment (no closed pattern can then start with that prefix).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from uiroutines.errors import ParameterError

CRITERIA = ("frequency", "length", "coverage", "cohesion")

Symbols = tuple[str, ...]


@dataclass(frozen=True)
class SequentialPattern:
    symbols: Symbols
    support_count: int
    support: float
    # segment index -> positions of the leftmost minimal-window embedding
    occurrences: Mapping[int, tuple[int, ...]] = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class RoutineCandidate:
    pattern: SequentialPattern
    criterion: str
    score: float
    rank: int
    # segment index -> log positions consumed by every removed occurrence
    consumed: Mapping[int, tuple[int, ...]] = field(default_factory=dict, compare=False)

    @property
    def symbols(self) -> Symbols:
        return self.pattern.symbols

    @property
    def positions(self) -> list[int]:
        return sorted(p for ps in self.consumed.values() for p in ps)


def check_min_support(min_support) -> float:
    try:
        ok = 0 < min_support <= 1
    except TypeError:
        ok = False
    if not ok:
        raise ParameterError(f"min_support must be in (0, 1], got {min_support!r}")
    return float(min_support)


def min_support_count(min_support: float, n_segments: int) -> int:
    # the epsilon keeps 0.3 * 10 from rounding up to 4
    return max(1, math.ceil(min_support * n_segments - 1e-9))


def embeds(pattern: Sequence, seq: Sequence) -> bool:
    it = iter(seq)
    return all(any(x == y for y in it) for x in pattern)


def leftmost_min_window(pattern: Sequence, seq: Sequence) -> tuple[int, ...] | None:
    """Positions of the embedding with the shortest span, leftmost among ties."""
    if not pattern:
        return ()
    best = None
    first = pattern[0]
    n = len(seq)
    for k in range(n):
        if seq[k] != first:
            continue
        pos = [k]
        j = k + 1
        for x in pattern[1:]:
            while j < n and seq[j] != x:
                j += 1
            if j == n:
                return best  # later starts cannot embed either
            pos.append(j)
            j += 1
        if best is None or pos[-1] - pos[0] < best[-1] - best[0]:
            best = tuple(pos)
    return best


def _first_instance(pattern, seq):
    """End positions of the leftmost embedding of every prefix of ``pattern``."""
    out = []
    j = 0
    for x in pattern:
        j = seq.index(x, j)
        out.append(j)
        j += 1
    return out


def _last_instance(pattern, seq, end):
    """Start positions of the rightmost embedding of every suffix within seq[:end+1]."""
    out = [0] * len(pattern)
    j = end
    for i in range(len(pattern) - 1, -1, -1):
        while seq[j] != pattern[i]:
            j -= 1
        out[i] = j
        j -= 1
    return out


def _common_in_periods(pattern, db, sids, semi):
    """True if some symbol sits in the same gap of every supporting sequence.

    Gap i lies between the leftmost embedding of pattern[:i] and the
    rightmost embedding of pattern[i:]. With ``semi`` the rightmost
    embedding is taken within the first instance of the whole pattern.
    """
    n = len(pattern)
    common: list[set | None] = [None] * n
    alive = set(range(n))
    for sid in sids:
        seq = db[sid]
        first = _first_instance(pattern, seq)
        if semi:
            end = first[-1]
        else:
            end = len(seq) - 1
            while seq[end] != pattern[-1]:
                end -= 1
        last = _last_instance(pattern, seq, end)
        for i in list(alive):
            lo = first[i - 1] + 1 if i else 0
            items = set(seq[lo:last[i]])
            common[i] = items if common[i] is None else common[i] & items
            if not common[i]:
                alive.discard(i)
        if not alive:
            return False
    return True


def mine_closed_patterns(segments: Sequence[Sequence[str]], min_support: float,
                         min_length: int = 1, occurrences: bool = True
                         ) -> list[SequentialPattern]:
    """All closed patterns with support >= ``min_support`` and length >= ``min_length``.

    ``min_support`` is a fraction of ``len(segments)``; the absolute floor
    is ``ceil(min_support * len(segments))`` and never below one segment.
    Results are sorted by decreasing support, then by symbols.
    """
    check_min_support(min_support)
    if min_length < 1:
        raise ParameterError(f"min_length must be >= 1, got {min_length!r}")
    n = len(segments)
    if not n:
        return []
    # identical segments are mined once and weighted by their multiplicity
    members: dict[tuple, list[int]] = {}
    for sid, seq in enumerate(segments):
        members.setdefault(tuple(seq), []).append(sid)
    db = list(members)
    weight = [len(v) for v in members.values()]
    min_count = min_support_count(min_support, n)
    found: list[tuple[Symbols, list[int]]] = []

    def grow(prefix, proj):
        counts = Counter()
        for uid, end in proj:
            w = weight[uid]
            for item in set(db[uid][end + 1:]):
                counts[item] += w
        support = sum(weight[uid] for uid, _ in proj)
        uids = [uid for uid, _ in proj]
        forward = any(c == support for c in counts.values())
        if (not forward and len(prefix) >= min_length
                and not _common_in_periods(prefix, db, uids, semi=False)):
            found.append((prefix, uids))
        for item in sorted(x for x, c in counts.items() if c >= min_count):
            new_proj = []
            for uid, end in proj:
                seq = db[uid]
                try:
                    new_proj.append((uid, seq.index(item, end + 1)))
                except ValueError:
                    pass
            extend(prefix + (item,), new_proj)

    def extend(prefix, proj):
        if not _common_in_periods(prefix, db, [uid for uid, _ in proj], semi=True):
            grow(prefix, proj)

    start = Counter()
    for uid, seq in enumerate(db):
        for item in set(seq):
            start[item] += weight[uid]
    for item in sorted(x for x, c in start.items() if c >= min_count):
        extend((item,), [(uid, seq.index(item)) for uid, seq in enumerate(db) if item in seq])

    out = []
    for symbols_, uids in found:
        sids = sorted(sid for uid in uids for sid in members[db[uid]])
        occ = {}
        if occurrences:
            windows = {uid: leftmost_min_window(symbols_, db[uid]) for uid in uids}
            occ = {sid: windows[uid] for uid in uids for sid in members[db[uid]]}
            occ = dict(sorted(occ.items()))
        out.append(SequentialPattern(symbols_, len(sids), len(sids) / n, occ))
    out.sort(key=lambda p: (-p.support_count, p.symbols))
    return out


def _lower_median(values: Sequence[int]):
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _windows(p: SequentialPattern, segments) -> list[tuple[int, ...]]:
    if p.occurrences:
        return list(p.occurrences.values())
    return [w for w in (leftmost_min_window(p.symbols, s) for s in segments) if w is not None]


def score_pattern(p: SequentialPattern, segments: Sequence[Sequence[str]],
                  total_log_size: int, criterion: str) -> float:
    """Quality of ``p`` under one of :data:`CRITERIA`.

    * frequency: number of supporting segments
    * length: number of symbols
    * coverage: symbols covered by one window per supporting segment,
      divided by ``total_log_size``
    * cohesion: length minus the (lower) median gap count of the windows
    """
    if criterion == "frequency":
        return float(p.support_count)
    if criterion == "length":
        return float(len(p.symbols))
    if criterion == "coverage":
        if total_log_size <= 0:
            raise ParameterError("total_log_size must be positive for coverage")
        return p.support_count * len(p.symbols) / total_log_size
    if criterion == "cohesion":
        gaps = [w[-1] - w[0] + 1 - len(w) for w in _windows(p, segments)]
        return float(len(p.symbols) - _lower_median(gaps))
    raise ParameterError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")


def _consume(symbols_: Symbols, seq: Sequence) -> tuple[list[int], list[int]]:
    """Indices of ``seq`` kept and removed by exhaustive window deletion."""
    keep = list(range(len(seq)))
    removed = []
    while True:
        window = leftmost_min_window(symbols_, [seq[i] for i in keep])
        if window is None:
            break
        gone = {keep[w] for w in window}
        removed.extend(gone)
        keep = [i for i in keep if i not in gone]
        if not symbols_:
            break
    return keep, sorted(removed)


def remove_occurrences(segments: Sequence[Sequence[str]], p: SequentialPattern | Sequence[str]
                       ) -> list[tuple[str, ...]]:
    """Delete every occurrence of ``p`` from each segment, leftmost window first."""
    symbols_ = tuple(getattr(p, "symbols", p))
    out = []
    for seq in segments:
        keep, _ = _consume(symbols_, seq)
        out.append(tuple(seq[i] for i in keep))
    return out


def _selection_key(scored):
    score, p = scored
    return (-score, -p.support_count, -len(p.symbols), p.symbols)


def extract_routines(segments: Sequence[Sequence[str]], min_support: float = 0.1,
                     min_length: int = 1, criterion: str = "cohesion",
                     total_log_size: int | None = None,
                     positions: Sequence[Sequence[int]] | None = None) -> list[RoutineCandidate]:
    """Greedy extraction of non-overlapping routine candidates.

    Each round mines the closed patterns of the current segments, keeps the
    best-scoring one and deletes all its occurrences before mining again.
    ``positions`` gives the log position of every segment symbol; by
    default segments are laid end to end starting at position 0.
    """
    check_min_support(min_support)
    if criterion not in CRITERIA:
        raise ParameterError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    current = [tuple(s) for s in segments]
    if positions is None:
        positions, offset = [], 0
        for s in current:
            positions.append(list(range(offset, offset + len(s))))
            offset += len(s)
    current_pos = [list(p) for p in positions]
    if any(len(a) != len(b) for a, b in zip(current, current_pos)):
        raise ParameterError("positions must parallel segments")
    if total_log_size is None:
        total_log_size = sum(len(s) for s in current)
    if not current:
        return []

    out = []
    while True:
        patterns = mine_closed_patterns(current, min_support, min_length,
                                        occurrences=criterion == "cohesion")
        if not patterns:
            break
        scored = [(score_pattern(p, current, total_log_size, criterion), p) for p in patterns]
        score, best = min(scored, key=_selection_key)
        occ = {}
        consumed = {}
        for sid, seq in enumerate(current):
            if not embeds(best.symbols, seq):
                continue
            occ[sid] = tuple(current_pos[sid][i] for i in leftmost_min_window(best.symbols, seq))
            keep, removed = _consume(best.symbols, seq)
            consumed[sid] = tuple(current_pos[sid][i] for i in removed)
            current[sid] = tuple(seq[i] for i in keep)
            current_pos[sid] = [current_pos[sid][i] for i in keep]
        best = SequentialPattern(best.symbols, best.support_count, best.support, occ)
        out.append(RoutineCandidate(best, criterion, score, len(out) + 1, consumed))
    return out
