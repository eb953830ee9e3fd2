import pytest

from geonresp.mode_table import get_or_build


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("tables"))


@pytest.fixture(scope="session")
def table_r3(cache_dir):
    """Default mode table at the baseline radius, built once per session."""
    table, _ = get_or_build(3.0, cache_dir=cache_dir)
    return table
