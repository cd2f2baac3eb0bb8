import numpy as np
import pytest

from torusdyn.maps import (
    LinearAutomorphism,
    PerturbedTranslation,
    SkewShear,
    StandardMap,
    Translation,
)

OMEGA_IRR = (np.sqrt(2.0) - 1.0, np.sqrt(3.0) - 1.0)

# one line per acceptance criterion, echoed after the run summary so the
# pass/fail record survives pytest's output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_catalog():
    """One representative of every catalog kind."""
    return [
        Translation(omega=(0.3, 0.4)),
        LinearAutomorphism(matrix=((2, 1), (1, 1))),
        SkewShear(omega=(0.2, 0.5), amplitude=0.1, frequency=2),
        StandardMap(k=1.5),
        PerturbedTranslation(
            omega=OMEGA_IRR, center=(0.5, 0.5), radius=0.12, strength=0.6
        ),
    ]


@pytest.fixture(scope="session")
def catalog():
    return make_catalog()


@pytest.fixture
def cat_map():
    return LinearAutomorphism(matrix=((2, 1), (1, 1)))


def random_posdet_matrices(count, seed, scale=2.0, min_det=0.1):
    """Random 2x2 matrices with determinant >= min_det (row flip, reject)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        J = rng.uniform(-scale, scale, (2, 2))
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if det < 0:
            J[0] *= -1.0
            det = -det
        if det >= min_det:
            out.append(J)
    return out
