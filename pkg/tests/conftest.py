from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("freeharm", deadline=None, max_examples=100, derandomize=True)
settings.load_profile("freeharm")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in mod.RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}")
