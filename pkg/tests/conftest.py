import pytest

import trustpd as tp


@pytest.fixture(scope="session")
def fig_params():
    """Parameters of the worked regime-structure example."""
    return tp.validate_params(3.0, 50.0)


@pytest.fixture(scope="session")
def fig_dist():
    return tp.uniform_loss(8.0)


@pytest.fixture(scope="session")
def p28():
    return tp.validate_params(2.0, 8.0)


@pytest.fixture(scope="session")
def unit_loss():
    return tp.uniform_loss(1.0)


@pytest.fixture(scope="session")
def unit_belief():
    return tp.uniform_belief()


@pytest.fixture(scope="session")
def diverse_28(p28, unit_loss, unit_belief):
    """Converged dispersed-belief cutoff for (b, m) = (2, 8), shared across tests."""
    return tp.solve_diverse_threshold(p28, unit_loss, unit_belief)
