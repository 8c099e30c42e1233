import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture
def models_dir():
    return ROOT / "models"


@pytest.fixture
def cli():
    path = os.environ.get("MSEQUIV_CLI")
    if not path:
        pytest.skip("MSEQUIV_CLI not set")
    return path


@pytest.fixture
def report_schema():
    import json

    return json.loads((ROOT / "schemas" / "report.schema.json").read_text())
