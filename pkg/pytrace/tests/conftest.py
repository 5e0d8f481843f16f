import json

import pytest

from shimutil import CORPUS


@pytest.fixture(scope="session")
def oracles():
    return json.loads((CORPUS / "oracles.json").read_text(encoding="utf-8"))
