import functools

import numpy as np
import pytest

from basstune.advisor import combined_response
from basstune.monitors import load_bundled_dataset, median_response
from basstune.voicemodel import VoiceParams, synth_voice

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=None)
def voice(**kw):
    """Cached synthesis; keyword arguments go to VoiceParams."""
    return synth_voice(VoiceParams(**kw))


@pytest.fixture(scope="session")
def speakers():
    return load_bundled_dataset()


@pytest.fixture(scope="session")
def bundled_curve(speakers):
    return median_response(speakers)


@pytest.fixture(scope="session")
def combined60(bundled_curve):
    return combined_response(bundled_curve, 60.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
