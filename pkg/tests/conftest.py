"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""

from collections import defaultdict

import pytest

_OUTCOMES: dict[int, list[tuple[bool, str]]] = defaultdict(list)
_TITLES: dict[int, str] = {}


class Ledger:
    def title(self, criterion: int, text: str) -> None:
        _TITLES[criterion] = text

    def record(self, criterion: int, ok: bool, detail: str) -> bool:
        _OUTCOMES[criterion].append((bool(ok), detail))
        return bool(ok)


@pytest.fixture(scope="session")
def acceptance():
    return Ledger()


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_OUTCOMES):
        entries = _OUTCOMES[criterion]
        ok = all(flag for flag, _ in entries)
        failed = [d for flag, d in entries if not flag]
        detail = "; ".join(failed) if failed else f"{len(entries)} checks"
        terminalreporter.write_line(
            f"criterion {criterion} [{_TITLES.get(criterion, '')}]: {'PASS' if ok else 'FAIL'} ({detail})"
        )
