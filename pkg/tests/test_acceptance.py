"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the
"acceptance criteria" section of the pytest summary.
"""

import math
import random
import time

import pytest

import oracles
from conftest import D, F, N, P, S
from uiroutines.cfg import (
    ENTRY,
    HEADER,
    IRREDUCIBLE,
    Cfg,
    build_cfg,
    compute_dominator_tree,
    detect_back_edges,
)
from uiroutines.loggen import GeneratorSpec, generate, make_variants, split_evenly
from uiroutines.metrics import evaluate, jaccard, levenshtein, normalized_led
from uiroutines.mining import CRITERIA, mine_closed_patterns
from uiroutines.pipeline import PipelineConfig, mine_segments, run_pipeline, segment_log
from uiroutines.uilog import LogFormat, parse_log

pytestmark = pytest.mark.acceptance


def _evaluate(result, truth):
    seg = result.segmentation
    rows = seg.rows()
    pairs = [([rows[i] for i in s.positions], s.symbols) for s in seg.report.segments]
    cands = result.mining.candidates
    return evaluate(pairs, [c.symbols for c in cands], [c.positions for c in cands], truth,
                    len(seg.nlog))


def test_1_worked_example(criterion, worked_example_text, worked_example_schema):
    with criterion("1 worked example (CFG, dominators, back-edges, segments)") as note:
        t0 = time.perf_counter()
        seg = segment_log(parse_log(worked_example_text, LogFormat()), PipelineConfig(schema=worked_example_schema))
        elapsed = time.perf_counter() - t0
        assert [u.key for u in seg.nlog] == [N, F, D, P, S, N, D, P, F, S]
        assert seg.graph.edges == {(N, F), (F, D), (D, P), (P, S), (S, N), (N, D), (P, F), (F, S)}
        assert dict(seg.dominators.idom) == {N: ENTRY, F: N, D: N, S: N, P: D}
        assert dict(seg.back_edges.origin) == {(S, N): HEADER, (P, F): IRREDUCIBLE}
        report = seg.report
        assert [(s.start_index, s.end_index) for s in report.segments] == [(0, 4), (5, 9)]
        assert report.discarded_indices == () and report.open_tail == ()
        assert elapsed < 1.0
        note["detail"] = f"2 segments, 0 discarded, {elapsed * 1000:.0f} ms"


def test_2_single_routine_rediscovery(criterion):
    with criterion("2 single routine x100 rediscovered under every criterion") as note:
        gen = generate(GeneratorSpec([make_variants(1, 14)[0]], 100, rng_seed=1))
        log = parse_log(gen.csv_text, LogFormat())
        assert len(log) == 1400
        t0 = time.perf_counter()
        lines = []
        for crit in CRITERIA:
            result = run_pipeline(log, PipelineConfig(schema=gen.schema, criterion=crit))
            ev = _evaluate(result, gen.truth)
            assert ev.discovered_segments == 100
            assert ev.avg_led == 0.0
            assert ev.discovered_routines == 1
            assert ev.avg_routine_length == 14
            assert ev.avg_jc == 1.0
            assert ev.total_coverage == 1.0
            lines.append(crit)
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0
        note["detail"] = f"100 segments, LED 0, 1 routine of 14, JC 1, coverage 1 for {', '.join(lines)}"


def test_3_interleaved_tasks_merge(criterion):
    with criterion("3 interleaved two tasks x50 gives 50 merged segments") as note:
        a = make_variants(1, 8, seed=1, start="Click button:Open Request", prefix="Request",
                          end_label="Approve")[0]
        b = make_variants(1, 6, seed=2, start="Click button:Open Ticket", prefix="Ticket",
                          end_label="Close")[0]
        gen = generate(GeneratorSpec([a, b], [50, 50], "interleaved", rng_seed=4,
                                     task_of_variant=[0, 1]))
        assert len(gen.truth.segments) == 100
        seg = segment_log(parse_log(gen.csv_text, LogFormat()), PipelineConfig(schema=gen.schema))
        n = len(seg.report.segments)
        assert n == 50
        assert all(len(s) == len(a) + len(b) for s in seg.report.segments)
        note["detail"] = f"{n} of 100 truth segments"


def test_4_dominators_against_oracle(criterion):
    with criterion("4 dominator tree vs vertex-removal oracle, 500 graphs") as note:
        rng = random.Random(2024)
        t0 = time.perf_counter()
        mismatches = 0
        for _ in range(500):
            g = Cfg.from_edges(*oracles.random_digraph(rng, rng.randint(1, 12),
                                                       rng.uniform(0.15, 0.5)))
            dt = compute_dominator_tree(g)
            everything = [ENTRY, *g.vertices]
            got = {(a, b) for a in everything for b in g.vertices if dt.dominates(a, b)}
            got.add((ENTRY, ENTRY))
            mismatches += got != oracles.dominance_pairs(g.successors(), ENTRY, everything)
        elapsed = time.perf_counter() - t0
        assert mismatches == 0
        assert elapsed < 30
        note["detail"] = "0 mismatches"


def test_5_closed_patterns_against_oracle(criterion):
    with criterion("5 closed patterns vs brute force, 200 databases x 3 supports") as note:
        rng = random.Random(5)
        t0 = time.perf_counter()
        mismatches = 0
        for _ in range(200):
            alphabet = "abcde"[:rng.randint(1, 5)]
            db = [tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 6)))
                  for _ in range(rng.randint(1, 6))]
            for ms in (0.3, 0.5, 1.0):
                got = {p.symbols: p.support_count for p in mine_closed_patterns(db, ms)}
                mismatches += got != oracles.closed_patterns(db, ms)
        elapsed = time.perf_counter() - t0
        assert mismatches == 0
        assert elapsed < 60
        note["detail"] = "0 mismatches over 600 runs"


def test_6_residual_graph_acyclic(criterion):
    with criterion("6 residual CFG acyclic, 200 random logs") as note:
        rng = random.Random(6)
        violations = 0
        for _ in range(200):
            alphabet = rng.randint(1, 15)
            log = [f"s{rng.randrange(alphabet)}" for _ in range(rng.randint(1, 500))]
            g = build_cfg(log)
            b = detect_back_edges(g)
            violations += oracles.has_cycle(g.vertices, g.edges - b.edges)
        assert violations == 0
        note["detail"] = "0 violations"


def test_7_scale(criterion):
    with criterion("7 scale: 38 variants x 2000 instances") as note:
        variants = make_variants(38, 14, seed=9)
        gen = generate(GeneratorSpec(variants, split_evenly(2000, 38), rng_seed=9))
        log = parse_log(gen.csv_text, LogFormat())
        config = PipelineConfig(schema=gen.schema)
        t0 = time.perf_counter()
        seg = segment_log(log, config)
        t_seg = time.perf_counter() - t0
        symbols = [s.symbols for s in seg.report.segments]
        mine_segments(symbols, seg.segment_rows(), len(seg.nlog), config)
        t_all = time.perf_counter() - t0
        assert len(log) > 25_000
        assert t_seg < 10
        assert t_all < 120
        note["detail"] = (f"{len(log)} UIs, {len(symbols)} segments, "
                          f"segmentation {t_seg:.2f}s, pipeline {t_all:.2f}s")


def test_8_metrics(criterion):
    with criterion("8 metric examples and 1000 random pairs") as note:
        assert normalized_led((N, F, D, P, S), (N, F, D, P, S)) == 0.0
        assert normalized_led((N, F, D, P, S), (N, D, P, S)) == pytest.approx(0.2)
        assert normalized_led("abc", "xyz") == 1.0
        assert jaccard((N, F, D, P, S), (N, D, P, F, S)) == 1.0
        assert jaccard("ab", "ac") == pytest.approx(1 / 3)
        assert jaccard("ab", "cd") == 0.0
        assert jaccard("abcd", "abxy") == pytest.approx(1 / 3)
        rng = random.Random(8)
        violations = 0
        for _ in range(1000):
            a, b = ("".join(rng.choice("abcd") for _ in range(rng.randint(0, 8))) for _ in "ab")
            led, jc = normalized_led(a, b), jaccard(a, b)
            ok = (
                levenshtein(a, b) == oracles.edit_distance(a, b)
                and led == normalized_led(b, a) and 0 <= led <= 1 and (led == 0) == (a == b)
                and jc == jaccard(b, a) and 0 <= jc <= 1
                and (jc == 1) == (sorted(a) == sorted(b))
                and (not (a or b) or (jc == 0) == (not set(a) & set(b)))
                and not math.isnan(led)
            )
            violations += not ok
        assert violations == 0
        note["detail"] = "tabulated values exact, 0 violations"
