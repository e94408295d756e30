import pytest

from bitterm.logic.solver import SolverSession, SolverSettings


@pytest.fixture(params=["pysat", "cdcl"])
def session_factory(request):
    def make():
        return SolverSession(SolverSettings(backend=request.param))

    return make
