import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import D, F, N, P, S
from uiroutines.metrics import (
    GroundTruth,
    TruthSegment,
    evaluate,
    jaccard,
    jaccard_literal,
    levenshtein,
    normalized_led,
    routine_quality,
    segmentation_quality,
    total_coverage,
)

seqs = st.lists(st.sampled_from("abcd"), max_size=8).map(tuple)


def tagged(seq):
    """Multiset as a plain set of (symbol, occurrence number)."""
    seen = {}
    out = set()
    for x in seq:
        seen[x] = seen.get(x, 0) + 1
        out.add((x, seen[x]))
    return out


def truth_of(*segments, routines=()):
    out, pos = [], 0
    for syms in segments:
        out.append(TruthSegment(tuple(range(pos, pos + len(syms))), tuple(syms)))
        pos += len(syms)
    return GroundTruth(tuple(out), tuple(map(tuple, routines)))


class Consumed:
    def __init__(self, positions):
        self.positions = positions


# LED


def test_led_examples():
    assert normalized_led((N, F, D, P, S), (N, F, D, P, S)) == 0.0
    assert normalized_led((N, F, D, P, S), (N, D, P, S)) == pytest.approx(0.2)
    assert normalized_led("abc", "xyz") == 1.0
    assert normalized_led((), ()) == 0.0


def test_perfect_segmentation():
    truth = truth_of("abc", "abd")
    avg, per = segmentation_quality([(range(0, 3), "abc"), (range(3, 6), "abd")], truth)
    assert avg == 0.0 and per == [0.0, 0.0]


def test_one_extra_trailing_ui():
    base = [f"s{i}" for i in range(14)]
    truth = truth_of(base, base)
    avg, _ = segmentation_quality([(range(0, 15), base + ["s0"])], truth)
    assert avg == pytest.approx(1 / 15)


def test_merged_adjacent_segments():
    seg = list("abcdefg")
    truth = truth_of(seg, seg)
    _, per = segmentation_quality([(range(0, 14), seg + seg)], truth)
    assert per == [pytest.approx(0.5)]


def test_segment_outside_truth_scores_one():
    truth = truth_of("abc")
    avg, per = segmentation_quality([(range(0, 3), "abc"), (range(10, 12), "xy")], truth)
    assert per == [0.0, 1.0] and avg == 0.5


def test_no_discovered_segments_is_nan():
    assert math.isnan(segmentation_quality([], truth_of("ab"))[0])


def test_overlapping_truth_rejected():
    with pytest.raises(ValueError):
        GroundTruth((TruthSegment((0, 1), "ab"), TruthSegment((1, 2), "bc")))


# Jaccard


def test_jaccard_examples():
    assert jaccard((N, F, D, P, S), (N, D, P, F, S)) == 1.0
    assert jaccard("ab", "ac") == pytest.approx(1 / 3)
    assert jaccard("ab", "cd") == 0.0
    assert jaccard("abcd", "abxy") == pytest.approx(1 / 3)


def test_multiset_jaccard_counts_repeats():
    assert jaccard("aab", "ab") == pytest.approx(2 / 3)


def test_literal_jaccard_of_identical_routines():
    assert jaccard_literal("abc", "abc") == 0.5


def test_routine_quality():
    truth = GroundTruth(routines=(tuple("abcd"), tuple("wxyz")))
    avg, per = routine_quality(["abxy", "abcd"], truth)
    assert per == [pytest.approx(1 / 3), 1.0]
    assert avg == pytest.approx(2 / 3)


def test_no_discovered_routines_is_nan():
    avg, per = routine_quality([], GroundTruth(routines=(("a",),)))
    assert math.isnan(avg) and per == []


# coverage


def test_total_coverage_cases():
    assert total_coverage([Consumed(range(1400))], 1400) == 1.0
    assert total_coverage([], 1400) == 0.0
    twelve_of_fourteen = [p for s in range(100) for p in range(14 * s, 14 * s + 12)]
    assert total_coverage([Consumed(twelve_of_fourteen)], 1400) == pytest.approx(12 / 14)


def test_coverage_counts_each_position_once():
    assert total_coverage([Consumed([0, 1]), Consumed([1, 2])], 4) == 0.75


def test_coverage_is_monotone():
    rng = random.Random(0)
    cands = [Consumed(rng.sample(range(50), rng.randint(0, 10))) for _ in range(20)]
    values = [total_coverage(cands[:k], 50) for k in range(len(cands) + 1)]
    assert values == sorted(values)


def test_evaluate_report():
    truth = truth_of("abc", "abc", routines=["abc"])
    report = evaluate([(range(0, 3), "abc"), (range(3, 6), "abc")], [tuple("abc")],
                      [range(6)], truth, 6)
    assert report.avg_led == 0.0 and report.avg_jc == 1.0 and report.total_coverage == 1.0
    assert report.avg_routine_length == 3
    rows = report.table_rows()
    assert rows[0]["discovered_segments"] == 2 and rows[1]["jc"] == 1.0


# properties


@settings(max_examples=300, deadline=None)
@given(seqs, seqs, seqs)
def test_led_properties(a, b, c):
    assert levenshtein(a, b) == oracles.edit_distance(a, b)
    d = normalized_led(a, b)
    assert d == normalized_led(b, a)
    assert 0.0 <= d <= 1.0
    assert (d == 0.0) == (a == b)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@settings(max_examples=300, deadline=None)
@given(seqs, seqs)
def test_jaccard_properties(a, b):
    j = jaccard(a, b)
    ta, tb = tagged(a), tagged(b)
    if ta | tb:
        assert j == pytest.approx(len(ta & tb) / len(ta | tb))
    assert j == jaccard(b, a)
    assert 0.0 <= j <= 1.0
    assert (j == 1.0) == (sorted(a) == sorted(b))
    if a or b:
        assert (j == 0.0) == (not set(a) & set(b))
