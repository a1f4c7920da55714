import pathlib

import pytest

from risac.harness import configure_numerics

configure_numerics()

REPO = pathlib.Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def table1_path():
    return REPO / "configs" / "table1.ini"


@pytest.fixture(scope="session")
def table1_cfg(table1_path):
    from risac.scenario import load_config
    return load_config(table1_path)
