from pathlib import Path

import pytest

from irmia import load

FIGURES = Path(__file__).parent / "data" / "figures"


def figure(name: str):
    return load(FIGURES / f"{name}.irmia")


@pytest.fixture
def fig():
    return figure
