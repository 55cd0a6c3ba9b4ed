import time

import numpy as np
import pytest

from sixr import SynthesisConfig, Tolerances, synthesize

from helpers import ACCEPTANCE_RESULTS, DEMO_POSES, DEMO_TOL


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def demo_run():
    """The full pipeline on the demo pose set, run once per session."""
    cfg = SynthesisConfig(tolerances=Tolerances(input=DEMO_TOL))
    start = time.perf_counter()
    report = synthesize(DEMO_POSES, cfg)
    elapsed = time.perf_counter() - start
    return {"report": report, "elapsed": elapsed, "config": cfg}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria")
    for name, ok, failures in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"  {name}: {status}")
        for f in failures:
            terminalreporter.write_line(f"      {f}")
