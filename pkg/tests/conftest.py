from __future__ import annotations

import cmath
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from darboux_conn.companion import make_config  # noqa: E402
from darboux_conn.curve import make_curve  # noqa: E402
from darboux_conn.spectral import irregular_spectrum, logarithmic_spectrum  # noqa: E402

settings.register_profile("repro", derandomize=True, database=None, deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repro")

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


SAMPLE_POINTS = [(0.3 + 0.2j, 0.5), (-1.1 + 0.4j, -0.2 + 0.1j), (2.5 - 0.7j, 1.3)]


@pytest.fixture(scope="session")
def lam2():
    return make_curve(2)


@pytest.fixture(scope="session")
def log_data(lam2):
    return logarithmic_spectrum(lam2, 3, np.sqrt(6), (0.25, -0.25), (-1 / 3, -2 / 3))


@pytest.fixture(scope="session")
def irr_data(lam2):
    return irregular_spectrum(lam2, "0", (0.3, -0.4), 0.2)


def sample_config(curve, spectral, points=SAMPLE_POINTS):
    return make_config(curve, spectral, [(u, cmath.sqrt(curve.K(u)), z) for u, z in points])


@pytest.fixture(scope="session")
def log_config(lam2, log_data):
    return sample_config(lam2, log_data)


@pytest.fixture(scope="session")
def irr_config(lam2, irr_data):
    return sample_config(lam2, irr_data)
