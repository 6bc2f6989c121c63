"""Synthetic UI logs with known segments and routines.

Routine variants are sequences of abstract step names. A step written
``"Click button:Submit"`` becomes a UI of type ``Click button`` on element
``Submit``; a bare name becomes an ``Edit field`` with a random typed value.
Randomness comes from :class:`random.Random` (Mersenne Twister) seeded with
``rng_seed``, so a given spec always yields byte-identical CSV.
"""

from __future__ import annotations

import csv
import io
import json
import random
import string
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta

from uiroutines.errors import ParameterError
from uiroutines.metrics import GroundTruth, TruthSegment
from uiroutines.uilog import ContextSchema, NormalizedUI

COMPOSITIONS = ("single", "concatenated", "interleaved")
NOISE_PREFIX = "~noise"
APPLICATION = "App"
LOG_COLUMNS = ("Timestamp", "Type", "Application", "Element Label", "Element Value")
TRUTH_COLUMNS = ("position", "symbol", "segment_id", "routine_id", "task_id", "noise")
START = datetime(2020, 1, 6, 9, 0, 0)


@dataclass
class GeneratorSpec:
    routine_variants: list[list[str]]
    instances_per_variant: int | list[int] = 100
    composition: str = "single"
    noise_rate: float = 0.0
    rng_seed: int = 0
    task_of_variant: list[int] | None = None  # default: every variant is task 0
    noise_alphabet: int = 5

    def validate(self):
        if self.composition not in COMPOSITIONS:
            raise ParameterError(f"composition must be one of {COMPOSITIONS}")
        if not 0 <= self.noise_rate < 1:
            raise ParameterError(f"noise_rate must be in [0, 1), got {self.noise_rate}")
        counts = self.instance_counts()
        if any(c < 0 for c in counts):
            raise ParameterError("instance counts must be non-negative")
        tasks = self.tasks()
        if len(tasks) != len(self.routine_variants):
            raise ParameterError("task_of_variant must have one entry per variant")
        if self.composition == "single" and len(set(tasks)) > 1:
            raise ParameterError("single composition takes variants of one task")
        for v in self.routine_variants:
            if not v:
                raise ParameterError("routine variants must be non-empty")
            if any(step.split(":")[-1].startswith(NOISE_PREFIX) for step in v):
                raise ParameterError(f"step names may not start with {NOISE_PREFIX!r}")
        if self.noise_alphabet < 1:
            raise ParameterError("noise_alphabet must be >= 1")

    def instance_counts(self) -> list[int]:
        n = self.instances_per_variant
        if isinstance(n, int):
            return [n] * len(self.routine_variants)
        if len(n) != len(self.routine_variants):
            raise ParameterError("instances_per_variant list must match the variants")
        return list(n)

    def tasks(self) -> list[int]:
        if self.task_of_variant is None:
            return [0] * len(self.routine_variants)
        return list(self.task_of_variant)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_dict(cls, data) -> GeneratorSpec:
        return cls(**data)


def split_step(step: str) -> tuple[str, str]:
    if ":" in step:
        ui_type, label = step.split(":", 1)
        return ui_type, label
    return "Edit field", step


def step_key(step: str) -> str:
    ui_type, label = split_step(step)
    return NormalizedUI(ui_type, (("Application", APPLICATION), ("Element Label", label))).key


def generator_schema(spec: GeneratorSpec) -> ContextSchema:
    types = {"Click button", "Edit field"}
    for v in spec.routine_variants:
        types.update(split_step(s)[0] for s in v)
    return ContextSchema({t: ("Application", "Element Label") for t in sorted(types)})


def _order_instances(spec: GeneratorSpec, rng: random.Random) -> list[int]:
    """Variant index of every emitted instance, in log order."""
    per_task: dict[int, list[int]] = {}
    for vi, (task, count) in enumerate(zip(spec.tasks(), spec.instance_counts())):
        per_task.setdefault(task, []).extend([vi] * count)
    for insts in per_task.values():
        rng.shuffle(insts)
    queues = [per_task[t] for t in sorted(per_task)]
    if spec.composition in ("single", "concatenated"):
        return [v for q in queues for v in q]
    order = []
    for i in range(max((len(q) for q in queues), default=0)):
        order.extend(q[i] for q in queues if i < len(q))
    return order


def _value(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_letters) for _ in range(rng.randint(4, 10)))


@dataclass
class GeneratedLog:
    csv_text: str
    truth: GroundTruth
    truth_csv: str
    schema: ContextSchema
    steps: list[str] = field(default_factory=list)


def generate(spec: GeneratorSpec) -> GeneratedLog:
    """Emit a CSV log plus its ground truth.

    Noise steps (drawn from a reserved alphabet) are inserted with
    probability ``noise_rate`` in front of every routine step and in every
    gap between instances. Noise inside an instance belongs to that
    instance's truth segment.
    """
    spec.validate()
    rng = random.Random(spec.rng_seed)
    noise_steps = [f"Click button:{NOISE_PREFIX}-{k}" for k in range(spec.noise_alphabet)]
    tasks = spec.tasks()

    steps: list[str] = []
    noise_flags: list[bool] = []
    truth_rows: list[tuple[int | None, int | None]] = []  # (segment id, variant)
    segments: list[tuple[list[int], int]] = []

    def emit(step, noise, seg, variant):
        steps.append(step)
        noise_flags.append(noise)
        truth_rows.append((seg, variant))
        return len(steps) - 1

    for sid, vi in enumerate(_order_instances(spec, rng)):
        if sid and spec.noise_rate and rng.random() < spec.noise_rate:
            emit(rng.choice(noise_steps), True, None, None)
        positions = []
        for k, step in enumerate(spec.routine_variants[vi]):
            if k and spec.noise_rate and rng.random() < spec.noise_rate:
                positions.append(emit(rng.choice(noise_steps), True, sid, vi))
            positions.append(emit(step, False, sid, vi))
        segments.append((positions, vi))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LOG_COLUMNS)
    ts = START
    for step in steps:
        ts += timedelta(seconds=rng.randint(1, 30))
        ui_type, label = split_step(step)
        value = _value(rng) if ui_type == "Edit field" else "--"
        writer.writerow([ts.isoformat(), ui_type, APPLICATION, label, value])

    keys = [step_key(s) for s in steps]
    truth = GroundTruth(
        tuple(
            TruthSegment(tuple(pos), tuple(keys[p] for p in pos), _routine_id(tasks, vi))
            for pos, vi in segments
        ),
        tuple(tuple(step_key(s) for s in v) for v in spec.routine_variants),
    )
    tbuf = io.StringIO()
    twriter = csv.writer(tbuf, lineterminator="\n")
    twriter.writerow(TRUTH_COLUMNS)
    for pos, (key, (seg, vi), noise) in enumerate(zip(keys, truth_rows, noise_flags)):
        twriter.writerow([
            pos, key,
            "" if seg is None else seg,
            "" if vi is None else _routine_id(tasks, vi),
            "" if vi is None else tasks[vi],
            int(noise),
        ])
    return GeneratedLog(buf.getvalue(), truth, tbuf.getvalue(), generator_schema(spec), steps)


def _routine_id(tasks, vi) -> str:
    return f"t{tasks[vi]}v{vi}"


def read_truth(csv_text: str) -> GroundTruth:
    """Parse a ground-truth CSV written by :func:`generate`.

    The truth routine of a routine id is the noise-free step sequence of
    its first segment.
    """
    reader = csv.DictReader(io.StringIO(csv_text))
    missing = {"position", "symbol", "segment_id"} - set(reader.fieldnames or ())
    if missing:
        raise ParameterError(f"ground-truth CSV lacks columns {sorted(missing)}")
    segs: dict[str, dict] = {}
    for row in reader:
        sid = row["segment_id"]
        if sid == "":
            continue
        rid = row.get("routine_id") or None
        seg = segs.setdefault(sid, {"pos": [], "sym": [], "clean": [], "rid": rid})
        seg["pos"].append(int(row["position"]))
        seg["sym"].append(row["symbol"])
        if row.get("noise", "0") in ("0", ""):
            seg["clean"].append(row["symbol"])
    ordered = sorted(segs.values(), key=lambda s: s["pos"][0])
    routines: dict[str, tuple[str, ...]] = {}
    for s in ordered:
        routines.setdefault(s["rid"] or f"seg{s['pos'][0]}", tuple(s["clean"]))
    return GroundTruth(
        tuple(TruthSegment(tuple(s["pos"]), tuple(s["sym"]), s["rid"]) for s in ordered),
        tuple(routines.values()),
    )


def make_variants(n_variants: int, length: int = 14, seed: int = 0, n_ends: int = 3,
                  swap_prob: float = 0.15, skip_prob: float = 0.08,
                  start: str = "Click button:New Record", prefix: str = "Field",
                  end_label: str = "Submit") -> list[list[str]]:
    """A family of variants of one task sharing their first step.

    The first variant is a base sequence of ``length - 2`` edit steps
    between the shared start and the first end click. Every other variant
    swaps adjacent steps and skips steps of the base, then ends with one of
    ``n_ends`` submit-like clicks that appear nowhere else.
    """
    if length < 2:
        raise ParameterError("variant length must be >= 2")
    rng = random.Random(seed)
    base = [f"{prefix} {i + 1}" for i in range(length - 2)]
    ends = [f"Click button:{end_label} {k + 1}" for k in range(n_ends)]
    seen = set()
    out = []
    for _ in range(200 * max(1, n_variants)):
        if len(out) == n_variants:
            break
        if not out:
            variant = [start, *base, ends[0]]
        else:
            middle = [s for s in base if rng.random() >= skip_prob]
            for i in range(len(middle) - 1):
                if rng.random() < swap_prob:
                    middle[i], middle[i + 1] = middle[i + 1], middle[i]
            variant = [start, *middle, rng.choice(ends)]
        if tuple(variant) not in seen:
            seen.add(tuple(variant))
            out.append(variant)
    if len(out) < n_variants:
        raise ParameterError(f"could not build {n_variants} distinct variants of length {length}")
    return out


def split_evenly(total: int, parts: int) -> list[int]:
    q, r = divmod(total, parts)
    return [q + (i < r) for i in range(parts)]
