import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "esskit", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("esskit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    from .helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        items = ACCEPTANCE[k]
        failed = [label for label, ok, _ in items if not ok]
        status = "PASS" if not failed else "FAIL"
        note = f" (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {k}: {status} [{len(items) - len(failed)}/{len(items)} checks]{note}")
