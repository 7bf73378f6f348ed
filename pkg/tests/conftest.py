import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from _support import ACCEPTANCE  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[cid]
        tr.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
