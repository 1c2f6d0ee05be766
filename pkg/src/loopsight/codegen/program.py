from __future__ import annotations

import enum
from dataclasses import dataclass, field


class ClassLabel(enum.IntEnum):
    AMBIGUOUS = 0
    INDEPENDENT = 1

    @classmethod
    def parse(cls, text: str) -> "ClassLabel":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown class {text!r}; expected 'independent' or 'ambiguous'") from None

    @property
    def slug(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Program:
    """One GA individual: source text plus its class label."""

    source: str
    label: ClassLabel
    line_count: int = field(init=False, compare=False)

    def __post_init__(self):
        if not self.source:
            raise ValueError("program source must be non-empty")
        object.__setattr__(self, "line_count", len(self.source.splitlines()))

    @property
    def lines(self) -> list[str]:
        return self.source.splitlines()

    @classmethod
    def from_lines(cls, lines: list[str], label: ClassLabel) -> "Program":
        return cls("\n".join(lines) + "\n", label)
