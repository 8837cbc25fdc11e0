"""Collects one verdict line per acceptance criterion for the run summary."""
from __future__ import annotations

from dataclasses import dataclass, field

LINES: dict[int, str] = {}


@dataclass
class Criterion:
    number: int
    title: str
    checks: list[tuple[str, bool]] = field(default_factory=list)

    def check(self, label: str, ok: bool) -> bool:
        self.checks.append((label, bool(ok)))
        return bool(ok)

    def close(self) -> None:
        failed = [label for label, ok in self.checks if not ok]
        verdict = "PASS" if not failed else "FAIL"
        line = f"criterion {self.number:2d} {verdict}  {self.title} ({len(self.checks) - len(failed)}/{len(self.checks)} checks)"
        if failed:
            line += "; failing: " + "; ".join(failed)
        LINES[self.number] = line
        print(line)
        assert not failed, line
