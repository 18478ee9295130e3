import pytest

from microhol.bootstrap import install_logic
from microhol.kernel import Theory


@pytest.fixture(scope="session")
def logic():
    """One bootstrapped logic for the whole run; read-only after setup."""
    return install_logic(Theory())


@pytest.fixture(scope="session")
def theory(logic):
    return logic.theory
