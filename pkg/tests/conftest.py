import numpy as np
import pytest

from mtp.qstate import QubitState

ACCEPTANCE_KEY = pytest.StashKey[list]()


def haar_states(rng, count, min_amp=0.0):
    """Haar-random normalized qubits, optionally with both |amplitudes| > min_amp."""
    out = []
    while len(out) < count:
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        if min(abs(v[0]), abs(v[1])) > min_amp:
            out.append(QubitState(complex(v[0]), complex(v[1])))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20081)


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Collects one verdict line per acceptance criterion for the terminal summary."""
    log = request.config.stash[ACCEPTANCE_KEY]

    def record(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else "")
        log.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
