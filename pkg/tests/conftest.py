from __future__ import annotations

import pytest

from zfcert import reference as ref
from zfcert.smoothing import ProofParams
from zfcert.suite import SuiteContext
from zfcert.trigpoly import PRIMES_BELOW_100

CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def suite_ctx() -> SuiteContext:
    """One memoizing context shared by every test that needs full certificates."""
    return SuiteContext()


@pytest.fixture(scope="session")
def variant_ctx(suite_ctx) -> SuiteContext:
    """Context for the second variant (A0 = 1/4.8594 up to exp(56.693))."""
    ctx = SuiteContext(params=ProofParams(A0=ref.VARIANT_A0["4.8594"]), log_t_max=ref.LOG_T_MAX["4.8594"])
    # the per-prime table certificates do not depend on A0
    ctx.results.update({f"mp-{p}": suite_ctx.get(f"mp-{p}") for p in PRIMES_BELOW_100})
    return ctx


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str) -> bool:
        CRITERIA[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
