import pytest

from x0plus import modsym


@pytest.fixture(scope="session")
def spaces():
    """Shared modular-symbol spaces, built once per test session."""
    built = {}

    def get(N):
        if N not in built:
            built[N] = modsym.build_space(N)
        return built[N]

    return get
