"""
Shared fixtures for the dualvote test suite
"""

import os
import sys
from pathlib import Path

import pytest

# Add repository root to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from tests.synthetic import sinusoid_sensors, two_tone, write_csv  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / 'data' / 'fixtures'

COOLING_VOTES = FIXTURES / 'cooling_votes.tsv'
COOLING_PRINTED = FIXTURES / 'cooling_stage_b_printed.tsv'
COOLING_IMPLIED = FIXTURES / 'cooling_stage_b_implied.tsv'
COOLING_MAE = FIXTURES / 'cooling_mae.tsv'

COOLING_MAE_VALUES = [0.43, 0.453, 0.007, 0.116, 0.484]


@pytest.fixture
def cooling_paths():
    return {
        'votes': COOLING_VOTES,
        'printed': COOLING_PRINTED,
        'implied': COOLING_IMPLIED,
        'mae': COOLING_MAE,
    }


@pytest.fixture
def sensors():
    """Small clean three-channel series"""
    return sinusoid_sensors(n=2000, seed=3)


@pytest.fixture
def tone_pair():
    return two_tone()


@pytest.fixture
def sensors_csv(tmp_path, sensors):
    return write_csv(sensors, tmp_path / 'sensors.csv')
