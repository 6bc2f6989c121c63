"""Removal of redundant UIs that are overwritten by later UIs.

A rule is a short window over the log. Each window slot names a category
of ui_types (``copy``, ``paste``, ``edit`` or ``any``); a match deletes the
slots listed in ``delete``. Rules run in order and the whole rule list is
re-applied until no rule matches any more.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from uiroutines.errors import ConfigError
from uiroutines.uilog import UILog, UserInteraction

DEFAULT_CATEGORIES = {
    "copy": ("Copy", "Copy cell", "Copy text", "Ctrl+C"),
    "paste": ("Paste", "Paste cell", "Paste text", "Ctrl+V"),
    "edit": ("Edit field", "Edit cell", "Edit text"),
}

TargetKey = Callable[[UserInteraction], object]


@dataclass(frozen=True)
class RedundancyRule:
    """Window pattern plus the slots to delete on a match.

    With ``barrier`` unset the slots must be adjacent. Otherwise a slot may
    be followed by any UIs outside the barrier categories before the next
    slot matches.
    """

    name: str
    pattern: tuple[str, ...]
    delete: tuple[int, ...]
    same_target: bool = False
    barrier: frozenset[str] | None = None

    def __post_init__(self):
        if not self.pattern:
            raise ConfigError(f"rule {self.name!r}: empty pattern")
        if not self.delete or any(not 0 <= d < len(self.pattern) for d in self.delete):
            raise ConfigError(f"rule {self.name!r}: delete slots out of range")

    @classmethod
    def from_dict(cls, data: Mapping) -> RedundancyRule:
        try:
            barrier = data.get("barrier")
            return cls(
                name=data["name"],
                pattern=tuple(data["pattern"]),
                delete=tuple(data["delete"]),
                same_target=bool(data.get("same_target", False)),
                barrier=None if barrier is None else frozenset(barrier),
            )
        except KeyError as exc:
            raise ConfigError(f"redundancy rule missing field {exc}") from None

    def to_dict(self) -> dict:
        out = {"name": self.name, "pattern": list(self.pattern), "delete": list(self.delete)}
        if self.same_target:
            out["same_target"] = True
        if self.barrier is not None:
            out["barrier"] = sorted(self.barrier)
        return out


OVERWRITTEN_COPY = RedundancyRule(
    "overwritten-copy", ("copy", "copy"), delete=(0,), barrier=frozenset({"paste"})
)
EDIT_OVERWRITE = RedundancyRule("edit-overwrite", ("edit", "edit"), delete=(0,), same_target=True)


def default_rules() -> list[RedundancyRule]:
    return [OVERWRITTEN_COPY, EDIT_OVERWRITE]


@dataclass
class RemovalReport:
    removed: dict[str, list[int]] = field(default_factory=dict)

    def add(self, rule: str, rows: Iterable[int]):
        self.removed.setdefault(rule, []).extend(rows)

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.removed.values())

    def as_dict(self) -> dict[str, list[int]]:
        return {k: sorted(v) for k, v in self.removed.items()}


class _Categorizer:
    def __init__(self, categories: Mapping[str, Sequence[str]]):
        self._types = {name: frozenset(types) for name, types in categories.items()}

    def __call__(self, ui: UserInteraction, category: str) -> bool:
        if category == "any":
            return True
        try:
            return ui.ui_type in self._types[category]
        except KeyError:
            raise ConfigError(f"unknown ui_type category {category!r}") from None

    def in_any(self, ui: UserInteraction, categories: Iterable[str]) -> bool:
        return any(self(ui, c) for c in categories)


def _default_target(ui: UserInteraction):
    return (ui.ui_type, tuple(sorted(ui.params.items())))


def _match_at(rule, uis, start, is_a, target):
    """Positions matched by ``rule`` with slot 0 at ``start``, or None."""
    if not is_a(uis[start], rule.pattern[0]):
        return None
    positions = [start]
    anchor = target(uis[start]) if rule.same_target else None
    for category in rule.pattern[1:]:
        j = positions[-1] + 1
        while j < len(uis):
            ui = uis[j]
            if is_a(ui, category) and (not rule.same_target or target(ui) == anchor):
                break
            if rule.barrier is None or is_a.in_any(ui, rule.barrier):
                return None
            j += 1
        else:
            return None
        positions.append(j)
    return positions


def find_matches(rule: RedundancyRule, uis: Sequence[UserInteraction], categories=None,
                 target: TargetKey | None = None) -> set[int]:
    """Indices into ``uis`` that one pass of ``rule`` deletes."""
    is_a = _Categorizer(categories or DEFAULT_CATEGORIES)
    target = target or _default_target
    doomed = set()
    for start in range(len(uis)):
        positions = _match_at(rule, uis, start, is_a, target)
        if positions is not None:
            doomed.update(positions[d] for d in rule.delete)
    return doomed


def apply_rules(log: UILog, rules: Sequence[RedundancyRule], categories=None,
                target: TargetKey | None = None) -> tuple[UILog, RemovalReport]:
    """Apply ``rules`` until a fixed point is reached.

    ``target`` maps a UI to the identity used by ``same_target`` rules;
    the pipeline passes the normalized key so that edits of the same field
    compare equal whatever value was typed.
    """
    report = RemovalReport()
    uis = list(log.interactions)
    changed = bool(rules)
    while changed:
        changed = False
        for rule in rules:
            doomed = find_matches(rule, uis, categories, target)
            if doomed:
                report.add(rule.name, (uis[i].row for i in sorted(doomed)))
                uis = [ui for i, ui in enumerate(uis) if i not in doomed]
                changed = True
    return UILog(tuple(uis), log.param_columns), report
