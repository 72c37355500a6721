import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from covdecomp.synth import SynthConfig, gen_model  # noqa: E402


@pytest.fixture(scope="session")
def default_model():
    return gen_model(SynthConfig(seed=0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, p, ridge=0.5):
    a = rng.normal(size=(p, p))
    return a @ a.T / p + ridge * np.eye(p)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance_log.RESULTS):
        ok, detail = acceptance_log.RESULTS[number]
        terminalreporter.write_line(f"{number}: {'PASS' if ok else 'FAIL'}  {detail}")
