import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bragg_feedback import REFERENCE_PARAMS  # noqa: E402


@pytest.fixture
def params():
    return REFERENCE_PARAMS
