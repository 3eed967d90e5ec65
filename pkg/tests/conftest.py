import pytest

from hartree5d import make_grid, solve_ground_state


@pytest.fixture(scope="session")
def grid_mid():
    return make_grid(2048, 30.0)


@pytest.fixture(scope="session")
def gs_mid(grid_mid):
    gs = solve_ground_state(grid_mid, tol=1e-12, max_iter=300)
    assert gs.converged
    return gs


@pytest.fixture(scope="session")
def grid_big():
    return make_grid(4096, 30.0)


@pytest.fixture(scope="session")
def gs_big(grid_big):
    gs = solve_ground_state(grid_big, tol=1e-12, max_iter=300)
    assert gs.converged
    return gs
