"""Suite-level reporting: collected acceptance lines and the wall budget.

Acceptance tests register one [PASS]/[FAIL] line each; they are replayed
after the run (capture is released by then) so the log always carries the
per-criterion outcomes.  The whole suite has a two-minute wall budget.
"""

import sys
import time

_T0 = time.monotonic()
_BUDGET_S = 120.0

ACCEPTANCE_LINES: list[str] = []


def pytest_sessionfinish(session, exitstatus):
    out = sys.__stdout__
    if ACCEPTANCE_LINES:
        print("\nacceptance summary:", file=out)
        for line in ACCEPTANCE_LINES:
            print(line, file=out)
    elapsed = time.monotonic() - _T0
    tag = "PASS" if elapsed < _BUDGET_S else "FAIL"
    print(f"[{tag}] full test suite wall time {elapsed:.1f}s "
          f"(budget {_BUDGET_S:.0f}s)", file=out, flush=True)
    if tag == "FAIL" and session.exitstatus == 0:
        session.exitstatus = 1
