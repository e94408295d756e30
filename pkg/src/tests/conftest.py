from pathlib import Path

import pytest

from bitterm.frontend import parse

CORPUS = Path(__file__).resolve().parents[2] / "data" / "01_raw"


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.mc").read_text()


@pytest.fixture
def load_program():
    """Parse a regression program from ``data/01_raw`` by stem."""

    def load(name: str, **kwargs):
        return parse(corpus_source(name), filename=f"{name}.mc", **kwargs)

    return load
