"""Collects acceptance verdicts and prints one line per criterion after the run."""

from __future__ import annotations

from collections import OrderedDict

VERDICTS: "OrderedDict[int, list[tuple[bool, str]]]" = OrderedDict()


def record(criterion: int, ok: bool, detail: str) -> None:
    VERDICTS.setdefault(criterion, []).append((ok, detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(VERDICTS):
        parts = VERDICTS[criterion]
        ok = all(p for p, _ in parts)
        terminalreporter.write_line(
            f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - " + "; ".join(d for _, d in parts)
        )
