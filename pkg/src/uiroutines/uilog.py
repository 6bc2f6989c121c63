"""UI log model: CSV parsing, context schemas and normalization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from uiroutines.errors import ConfigError, LogParseError, SchemaError

MISSING_VALUES = frozenset({"", "--"})


@dataclass(frozen=True)
class UserInteraction:
    """One recorded UI: timestamp, type and a parameter map.

    ``row`` is the position of the interaction in the parsed (sorted) log and
    is what removal reports and segment CSVs refer back to.
    """

    timestamp: datetime
    ui_type: str
    params: Mapping[str, str] = field(default_factory=dict)
    row: int = -1

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))


@dataclass(frozen=True)
class UILog:
    interactions: tuple[UserInteraction, ...] = ()
    param_columns: tuple[str, ...] = ()

    def __len__(self):
        return len(self.interactions)

    def __iter__(self):
        return iter(self.interactions)

    def __getitem__(self, i):
        return self.interactions[i]


@dataclass(frozen=True)
class LogFormat:
    """Column layout of a CSV UI log."""

    timestamp_column: str = "Timestamp"
    type_column: str = "Type"
    timestamp_format: str | None = None  # None means ISO-8601
    missing_values: frozenset[str] = MISSING_VALUES

    def parse_timestamp(self, text: str) -> datetime:
        text = text.strip()
        if self.timestamp_format is None:
            return datetime.fromisoformat(text)
        return datetime.strptime(text, self.timestamp_format)


def parse_log(csv_text: str, fmt: LogFormat | None = None) -> UILog:
    """Parse CSV text into a timestamp-ordered :class:`UILog`.

    Every column other than the timestamp and type columns is a parameter.
    Cells holding a missing marker are left out of the interaction's params.
    Ties in timestamp keep file order.
    """
    fmt = fmt or LogFormat()
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty input: a header row is required") from None
    header = [h.strip() for h in header]
    for col in (fmt.timestamp_column, fmt.type_column):
        if col not in header:
            raise SchemaError(f"missing mandatory column {col!r}; header is {header}")
    if len(set(header)) != len(header):
        raise SchemaError(f"duplicate column names in header {header}")
    ts_idx = header.index(fmt.timestamp_column)
    type_idx = header.index(fmt.type_column)
    param_cols = [(i, h) for i, h in enumerate(header) if i not in (ts_idx, type_idx)]

    raw = []
    for lineno, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise LogParseError(
                f"expected {len(header)} cells, got {len(cells)}", row=lineno
            )
        try:
            ts = fmt.parse_timestamp(cells[ts_idx])
        except ValueError as exc:
            raise LogParseError(
                f"malformed timestamp {cells[ts_idx]!r} ({exc})", row=lineno
            ) from None
        ui_type = cells[type_idx].strip()
        if not ui_type:
            raise LogParseError("empty ui type", row=lineno)
        params = {
            name: cells[i].strip()
            for i, name in param_cols
            if cells[i].strip() not in fmt.missing_values
        }
        raw.append((ts, ui_type, params))

    raw.sort(key=lambda r: r[0])  # stable: ties keep file order
    interactions = tuple(
        UserInteraction(ts, ui_type, params, row=i)
        for i, (ts, ui_type, params) in enumerate(raw)
    )
    return UILog(interactions, tuple(h for _, h in param_cols))


def read_log(path: str | Path, fmt: LogFormat | None = None) -> UILog:
    return parse_log(Path(path).read_text(encoding="utf-8"), fmt)


def write_log(log: UILog, fmt: LogFormat | None = None) -> str:
    """Serialize a log back to CSV text (inverse of :func:`parse_log`)."""
    fmt = fmt or LogFormat()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([fmt.timestamp_column, fmt.type_column, *log.param_columns])
    for ui in log:
        ts = (
            ui.timestamp.isoformat()
            if fmt.timestamp_format is None
            else ui.timestamp.strftime(fmt.timestamp_format)
        )
        writer.writerow([ts, ui.ui_type, *(ui.params.get(p, "") for p in log.param_columns)])
    return buf.getvalue()


DEFAULT_CONTEXT_POLICIES = ("error", "all", "none")


@dataclass(frozen=True)
class ContextSchema:
    """Context parameters per ui_type, as chosen by a domain expert.

    ``default`` decides what happens to a ui_type without an entry:
    ``"error"`` raises, ``"all"`` keeps every parameter (sorted by name),
    ``"none"`` keeps no parameter.
    """

    context_params: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    default: str = "error"

    def __post_init__(self):
        if self.default not in DEFAULT_CONTEXT_POLICIES:
            raise ConfigError(
                f"unknown default context policy {self.default!r}; "
                f"expected one of {DEFAULT_CONTEXT_POLICIES}"
            )
        frozen = {k: tuple(v) for k, v in self.context_params.items()}
        for ui_type, names in frozen.items():
            if len(set(names)) != len(names):
                raise ConfigError(f"duplicate context parameter for {ui_type!r}")
        object.__setattr__(self, "context_params", MappingProxyType(frozen))

    def params_for(self, ui: UserInteraction) -> tuple[str, ...]:
        try:
            return self.context_params[ui.ui_type]
        except KeyError:
            pass
        if self.default == "all":
            return tuple(sorted(ui.params))
        if self.default == "none":
            return ()
        raise ConfigError(f"ui_type {ui.ui_type!r} has no entry in the context schema")

    def to_dict(self) -> dict:
        return {
            "context": {k: list(v) for k, v in self.context_params.items()},
            "default_context": self.default,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> ContextSchema:
        context = data.get("context", {})
        if not isinstance(context, Mapping):
            raise ConfigError("'context' must map ui_type to a list of parameter names")
        for k, v in context.items():
            if isinstance(v, str) or not isinstance(v, Sequence):
                raise ConfigError(f"context entry for {k!r} must be a list of names")
        return cls(context, data.get("default_context", "error"))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def loads(cls, text: str) -> ContextSchema:
        return cls.from_dict(json.loads(text))


def _escape(text: str) -> str:
    out = text.replace("\\", "\\\\")
    for ch in "[];=":
        out = out.replace(ch, "\\" + ch)
    return out


@dataclass(frozen=True, eq=False)
class NormalizedUI:
    """A UI projected onto its context parameters.

    Equality and hashing use :attr:`key` only, i.e. the ui_type and the
    context values; the timestamp is carried along for reporting.
    """

    ui_type: str
    context_values: tuple[tuple[str, str], ...]
    timestamp: datetime | None = None
    key: str = field(init=False, repr=False)

    def __post_init__(self):
        ctx = ";".join(f"{_escape(p)}={_escape(v)}" for p, v in self.context_values)
        object.__setattr__(self, "key", f"{_escape(self.ui_type)}[{ctx}]")

    def __eq__(self, other):
        if not isinstance(other, NormalizedUI):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return self.key


NormalizedLog = Sequence[NormalizedUI]


def normalize_ui(ui: UserInteraction, schema: ContextSchema) -> NormalizedUI:
    # an absent cell is kept as an empty value so the key still names the parameter
    ctx = tuple((p, ui.params.get(p, "")) for p in schema.params_for(ui))
    return NormalizedUI(ui.ui_type, ctx, ui.timestamp)


def normalize(log: Iterable[UserInteraction], schema: ContextSchema) -> list[NormalizedUI]:
    return [normalize_ui(ui, schema) for ui in log]


def symbols(nlog: Iterable[NormalizedUI]) -> list[str]:
    return [n.key for n in nlog]


def sample_path(name: str) -> Path:
    """Path of a file bundled in ``uiroutines/data`` (e.g. ``"worked_example.csv"``)."""
    from importlib.resources import files

    return Path(str(files("uiroutines") / "data" / name))
