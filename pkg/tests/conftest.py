import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from amcheck import load_model

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def smallgame_path() -> pathlib.Path:
    return DATA / "smallgame.cgf.json"


@pytest.fixture
def smallgame(smallgame_path):
    return load_model(smallgame_path)


@pytest.fixture
def smallgame_min_ef_path() -> pathlib.Path:
    return DATA / "smallgame.min.ef.json"


@pytest.fixture
def smallgame_min_ef(smallgame_min_ef_path):
    return load_model(smallgame_min_ef_path)
