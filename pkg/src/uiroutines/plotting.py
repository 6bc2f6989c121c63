"""Figures written next to the CSV/JSON reports (PNG, Agg backend)."""

from __future__ import annotations

import functools
from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
}


def styled(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        with plt.rc_context(RC):
            return func(*args, **kwargs)
    return wrapper


def _new(width=5.0, height=3.0):
    fig, ax = plt.subplots(figsize=(width, height))
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    return fig, ax


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


@styled
def segment_lengths(report, path) -> Path:
    """Histogram of discovered segment lengths."""
    counts = Counter(len(s) for s in report.segments)
    fig, ax = _new()
    if counts:
        xs = sorted(counts)
        ax.bar(xs, [counts[x] for x in xs], color="0.35", width=0.8)
    ax.set_xlabel("segment length (UIs)")
    ax.set_ylabel("segments")
    ax.set_title(
        f"{len(report.segments)} segments, {len(report.discarded_indices)} discarded UIs"
    )
    return _save(fig, path)


@styled
def routine_coverage(candidates, coverage_total, path) -> Path:
    """UIs consumed per routine rank with the cumulative coverage curve."""
    fig, ax = _new()
    ranks = [c.rank for c in candidates]
    consumed = [len(c.positions) for c in candidates]
    ax.bar(ranks, consumed, color="0.6", label="UIs consumed")
    ax.set_xlabel("routine rank")
    ax.set_ylabel("UIs consumed")
    if candidates and coverage_total:
        ax2 = ax.twinx()
        seen: set[int] = set()
        cumulative = []
        for c in candidates:
            seen.update(c.positions)
            cumulative.append(len(seen) / coverage_total)
        ax2.plot(ranks, cumulative, "k.-")
        ax2.set_ylim(0, 1.05)
        ax2.set_ylabel("cumulative coverage")
    crit = candidates[0].criterion if candidates else "-"
    ax.set_title(f"{len(candidates)} routines ({crit})")
    return _save(fig, path)


@styled
def led_distribution(per_segment_led, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.0))
    if per_segment_led:
        ax.hist(per_segment_led, bins=20, range=(0, 1), color="0.35")
    ax.set_xlabel("normalized edit distance to best ground-truth segment")
    ax.set_ylabel("segments")
    return _save(fig, path)
