"""Check reports and the JSON conventions shared by every audit.

Extended values: ``math.inf`` is written as the string ``"inf"`` in JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
PARTIAL = "partial"
NOT_APPLICABLE = "not applicable"

_EXIT = {PASS: 0, NOT_APPLICABLE: 0, FAIL: 1, PARTIAL: 2}


@dataclass
class Report:
    check: str
    verdict: str = PASS
    witnesses: list = field(default_factory=list)
    window: Any = None
    stats: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict in (PASS, NOT_APPLICABLE)

    def fail(self, witness) -> None:
        self.verdict = FAIL
        self.witnesses.append(witness)

    def mark_partial(self, note: str) -> None:
        if self.verdict == PASS:
            self.verdict = PARTIAL
        self.notes.append(note)

    def finish(self) -> "Report":
        # deterministic witness order regardless of evaluation order
        self.witnesses.sort(key=lambda w: json.dumps(to_jsonable(w), sort_keys=True))
        return self

    def line(self) -> str:
        extra = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(self.stats.items()))
        return f"[{self.verdict.upper():>14}] {self.check}" + (f"  ({extra})" if extra else "")

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "check": self.check,
                "verdict": self.verdict,
                "witnesses": self.witnesses,
                "window": self.window,
                "stats": self.stats,
                "notes": self.notes,
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        d = from_jsonable(d)
        return cls(
            check=d["check"],
            verdict=d["verdict"],
            witnesses=list(d.get("witnesses", [])),
            window=d.get("window"),
            stats=dict(d.get("stats", {})),
            notes=list(d.get("notes", [])),
        )


def combine(reports) -> str:
    """Overall verdict: any fail wins, then any partial."""
    verdicts = {r.verdict for r in reports}
    if FAIL in verdicts:
        return FAIL
    if PARTIAL in verdicts:
        return PARTIAL
    return PASS


def exit_code(verdict: str) -> int:
    return _EXIT.get(verdict, 2)


def _fmt(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def to_jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if obj.is_integer():
            return int(obj)
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda x: json.dumps(x, sort_keys=True))
        return items
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return to_jsonable(obj.item())
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


def from_jsonable(obj):
    if obj == "inf":
        return math.inf
    if isinstance(obj, dict):
        return {k: from_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [from_jsonable(v) for v in obj]
    return obj


def ext(value) -> float | int:
    """Normalize an extended nonnegative integer (int or inf)."""
    if value is None:
        return math.inf
    if isinstance(value, float):
        return value if math.isinf(value) else int(value)
    return int(value)
