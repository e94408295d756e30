import pytest

from bitterm.logic.solver import SessionFactory
from bitterm.ssa import encode
from bitterm.synth import SynthesisBounds, TemplateSolver, Templates


@pytest.fixture
def sessions():
    return SessionFactory()


@pytest.fixture
def solver(sessions):
    return TemplateSolver(sessions, SynthesisBounds())


@pytest.fixture
def templates():
    return Templates()


@pytest.fixture
def encoded(load_program):
    """Encode one procedure of a regression program; the entry procedure by default."""

    def load(name: str, proc: str = None, **kwargs):
        program = load_program(name, **kwargs)
        return encode(program.procedures[proc or program.entry], program)

    return load
