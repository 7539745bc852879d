import numpy as np
import pytest

from coherence_lab.sampling import make_rng


@pytest.fixture
def rng():
    return make_rng(20111926)


def ket(*bits, dims=None):
    """Basis amplitude vector for ``|bits>`` (qubits unless dims given)."""
    dims = dims or (2,) * len(bits)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(bits, dims)] = 1
    return v


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def report(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        request.config._acceptance_lines.append((number, line))
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
