import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
for path in (os.path.join(ROOT, "lib"), os.path.join(ROOT, "inverter_control")):
    if path not in sys.path:
        sys.path.insert(0, path)

from core.config import ScenarioConfig  # noqa: E402
from core.plant import FilterParams  # noqa: E402

SCENARIO_DIR = os.path.join(ROOT, "experiments", "scenarios")


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run slow acceptance tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long closed-loop / training runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def nominal():
    return FilterParams.from_units(l_mh=2.0, c_uf=40.0, ts_us=30.0, vdc_v=500.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_scenario(id="T", load=None, **kw):
    params = dict(ts_us=30.0, l_mh=2.0, c_uf=40.0, vdc_v=500.0, vref_v=200.0,
                  freq_hz=50.0, cycles=2.0)
    params.update(kw)
    return ScenarioConfig(id=id, load=load or {"kind": "resistive", "r_ohm": 5000.0},
                          **params)


@pytest.fixture
def scenario_factory():
    return make_scenario
