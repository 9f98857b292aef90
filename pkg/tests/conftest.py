import sys
from importlib import resources
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import pytest

from qualred.dsl import parse_game


def fixture_text(name: str) -> str:
    return resources.files("qualred").joinpath("fixtures", name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def load_game():
    cache = {}

    def load(name: str):
        if name not in cache:
            cache[name] = parse_game(fixture_text(name))
        return cache[name]

    return load
