from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from transmon_antenna.em import FrequencyGrid
from transmon_antenna.pipeline import device_match, radiation_sweep
from transmon_antenna.reproduce import CANNED, JUNCTION, WINDOWS

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# Filled by test_acceptance; printed after the run so the table is always visible.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def device_runs():
    """Match reports for the four canned devices plus the wide 3D sweep."""
    windows = {"xmon_large": "fig4", "xmon_small": "fig4", "differential": "fig5",
               "3d": "fig6_match"}
    runs = {name: device_match(CANNED[name], JUNCTION, FrequencyGrid(*WINDOWS[w]))
            for name, w in windows.items()}
    runs["3d_wide"] = radiation_sweep(CANNED["3d"], FrequencyGrid(*WINDOWS["fig6_wide"]))
    return runs
