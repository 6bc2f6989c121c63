import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uiroutines.errors import ParameterError
from uiroutines.loggen import (
    NOISE_PREFIX,
    GeneratorSpec,
    generate,
    make_variants,
    read_truth,
    split_evenly,
    step_key,
)
from uiroutines.uilog import LogFormat, normalize, parse_log

VARIANT = make_variants(1, 14)[0]


def two_tasks():
    a = ["Click button:Open Request", "Requester", "Amount", "Click button:Approve"]
    b = ["Click button:Open Ticket", "Issue", "Click button:Close"]
    return [a, b]


def test_single_variant_shape():
    out = generate(GeneratorSpec([VARIANT], 100))
    log = parse_log(out.csv_text, LogFormat())
    assert len(log) == 1400
    assert len(out.truth.segments) == 100
    assert all(len(s.positions) == 14 for s in out.truth.segments)
    assert out.truth.routines == (tuple(step_key(s) for s in VARIANT),)


def test_zero_instances():
    out = generate(GeneratorSpec([VARIANT], 0))
    assert len(parse_log(out.csv_text, LogFormat())) == 0
    assert out.truth.segments == ()


def test_interleaved_tasks_alternate():
    out = generate(GeneratorSpec(two_tasks(), [50, 50], "interleaved", task_of_variant=[0, 1]))
    ids = [s.routine_id for s in out.truth.segments]
    assert len(ids) == 100
    assert ids == ["t0v0", "t1v1"] * 50


def test_concatenated_tasks_stay_in_blocks():
    out = generate(GeneratorSpec(two_tasks(), [3, 2], "concatenated", task_of_variant=[0, 1]))
    assert [s.routine_id for s in out.truth.segments] == ["t0v0"] * 3 + ["t1v1"] * 2


def test_same_seed_same_bytes():
    spec = GeneratorSpec(make_variants(4, 8, seed=1), 20, noise_rate=0.2, rng_seed=5)
    a, b = generate(spec), generate(spec)
    assert a.csv_text == b.csv_text and a.truth_csv == b.truth_csv
    assert generate(GeneratorSpec(spec.routine_variants, 20, noise_rate=0.2, rng_seed=6)).csv_text != a.csv_text


def test_noise_alphabet_is_disjoint_from_routines():
    spec = GeneratorSpec([VARIANT], 50, noise_rate=0.3, rng_seed=2)
    out = generate(spec)
    routine = set(out.truth.routines[0])
    noise = {step_key(s) for s in out.steps if NOISE_PREFIX in s}
    assert noise and not noise & routine
    # noise inside an instance is part of that instance's segment
    assert sum(len(s.positions) for s in out.truth.segments) > 50 * 14


@pytest.mark.parametrize("rate", [-0.1, 1.0, 2])
def test_invalid_noise_rate(rate):
    with pytest.raises(ParameterError):
        generate(GeneratorSpec([VARIANT], 1, noise_rate=rate))


@pytest.mark.parametrize("spec", [
    GeneratorSpec([VARIANT], 1, composition="shuffled"),
    GeneratorSpec([VARIANT], -1),
    GeneratorSpec([VARIANT, VARIANT], [1]),
    GeneratorSpec([[]], 1),
    GeneratorSpec(two_tasks(), 1, task_of_variant=[0, 1]),
    GeneratorSpec([[f"Click button:{NOISE_PREFIX}-1"]], 1),
])
def test_invalid_specs(spec):
    with pytest.raises(ParameterError):
        generate(spec)


def test_truth_csv_round_trip():
    out = generate(GeneratorSpec(make_variants(3, 6, seed=4), [4, 3, 2], noise_rate=0.25, rng_seed=1))
    back = read_truth(out.truth_csv)
    assert back.segments == out.truth.segments
    assert set(back.routines) == set(out.truth.routines)


def test_truth_symbols_match_normalized_log():
    out = generate(GeneratorSpec(make_variants(2, 5, seed=3), 5, noise_rate=0.2, rng_seed=8))
    keys = [u.key for u in normalize(parse_log(out.csv_text, LogFormat()), out.schema)]
    for seg in out.truth.segments:
        assert seg.symbols == tuple(keys[p] for p in seg.positions)


def test_spec_json_round_trip():
    spec = GeneratorSpec(two_tasks(), [2, 3], "interleaved", 0.1, 9, [0, 1])
    assert GeneratorSpec.from_dict(json.loads(spec.to_json())) == spec


def test_make_variants():
    vs = make_variants(38, 14, seed=9)
    assert len({tuple(v) for v in vs}) == 38
    assert all(v[0] == "Click button:New Record" for v in vs)
    assert len(vs[0]) == 14
    with pytest.raises(ParameterError):
        make_variants(5, 1)


@given(st.integers(0, 500), st.integers(1, 40))
@settings(deadline=None)
def test_split_evenly(total, parts):
    out = split_evenly(total, parts)
    assert sum(out) == total and len(out) == parts
    assert max(out) - min(out) <= 1
