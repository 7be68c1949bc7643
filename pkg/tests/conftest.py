from __future__ import annotations

from fractions import Fraction

import pytest

from fewcrn.repro import INTRO_PARAMS, load_network

# criterion number -> list of (check, passed) gathered by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[str, bool]]] = {}


class Recorder:
    """``record(n, check, ok)`` stores one sub-check of acceptance criterion ``n``."""

    def __call__(self, n: int, check: str, ok: bool) -> bool:
        ACCEPTANCE.setdefault(n, []).append((check, bool(ok)))
        return bool(ok)

    def failed(self, n: int) -> list[str]:
        return [c for c, ok in ACCEPTANCE.get(n, []) if not ok]


@pytest.fixture
def record():
    return Recorder()


@pytest.fixture
def intro_net():
    return load_network("intro.crn")


@pytest.fixture
def intro_params():
    return dict(INTRO_PARAMS)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[n]
        ok = all(p for _, p in checks)
        failed = [c for c, p in checks if not p]
        tail = "" if ok else "  (failed: " + "; ".join(failed) + ")"
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  [{len(checks)} checks]{tail}")


def frac(x) -> Fraction:
    return Fraction(x)
