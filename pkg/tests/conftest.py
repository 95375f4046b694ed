import json
from pathlib import Path

import pytest

ORACLES = Path(__file__).parent / "oracles"


@pytest.fixture(scope="session")
def mlf_golden():
    return json.loads((ORACLES / "mlf_golden.json").read_text())
