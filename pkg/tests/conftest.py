import pytest

from spde_damping import NoiseSpec, SpdeCoefficients

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def reference_coeffs():
    return SpdeCoefficients(theta0=0.0, theta1=0.2, eta1=0.2, theta2=0.2, sigma=1.0)


@pytest.fixture
def small_noise():
    return NoiseSpec(alpha=0.5, mu0=-19.5, trunc_k=16, trunc_l=16)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
