import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

# fixture generators live next to the other runnable scripts
sys.path.insert(0, str(ROOT / "scripts"))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def store(tmp_path):
    from adaudit.datastore import Datastore

    return Datastore(tmp_path / "data")
