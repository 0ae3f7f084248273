import json

import pytest

from model_core import ChannelGains, default_scenario
from services import ConfigurationService


@pytest.fixture(autouse=True)
def clean_configuration():
    """Each test starts with an empty configuration service (serial execution)."""
    ConfigurationService().reset()
    yield
    ConfigurationService().reset()


@pytest.fixture
def two_st():
    """The two-ST instance: both STs 11 m from the PT, 2 m and 2.5 m from the SAP."""
    cfg = default_scenario()
    return cfg, ChannelGains.from_config(cfg)


@pytest.fixture
def write_scenario(tmp_path):
    """Writes a scenario document to a temporary file and returns its path."""
    def _write(document, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document) if not isinstance(document, str) else document, encoding="utf-8")
        return str(path)
    return _write
