import numpy as np
import pytest

from dimbound.quantum import QuantumScenario, random_measurement_set, random_pure_state

_CRITERIA = []


@pytest.fixture
def record_criterion():
    """Record a one-line pass/fail verdict for the acceptance summary."""

    def record(name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


def random_scenario(dims, seed, settings=2, hermitian=True):
    """Haar-random pure state with random projective measurements on every party."""
    ss = np.random.SeedSequence(seed).spawn(len(dims) + 1)
    state = random_pure_state(dims, ss[0])
    ms = tuple(
        random_measurement_set(d, settings, s, hermitian=hermitian) for d, s in zip(dims, ss[1:])
    )
    return QuantumScenario(state, ms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
