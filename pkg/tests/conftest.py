import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conifold_slag.ambient import Patch, ResolvedPoint, TangentFrame, TangentVector

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance lines collected by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_LINES):
        status, text = ACCEPTANCE_LINES[crit]
        terminalreporter.write_line(f"{status} criterion {crit}: {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def point(patch, coords):
    return ResolvedPoint.from_local(patch, coords)


def vec(p, comps):
    return TangentVector(p, np.asarray(comps, dtype=complex))


def frame(p, *comps):
    return TangentFrame(p, *(vec(p, c) for c in comps))


def rand_point(rng, scale=1.0, patch=None):
    patch = patch or (Patch.PLUS if rng.random() < 0.5 else Patch.MINUS)
    return point(patch, scale * (rng.normal(size=3) + 1j * rng.normal(size=3)))


def rand_vec(rng, p):
    return vec(p, rng.normal(size=3) + 1j * rng.normal(size=3))
