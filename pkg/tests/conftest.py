import numpy as np
import pytest

from optkit import faithful
from optkit.models import classical_model, max_entangled_joint, quantum_model


@pytest.fixture(scope="session")
def qubit():
    return quantum_model(2)


@pytest.fixture(scope="session")
def qutrit():
    return quantum_model(3)


@pytest.fixture(scope="session")
def bit():
    return classical_model(2)


@pytest.fixture(scope="session")
def faithful_qubit(qubit):
    return faithful.f_matrix(max_entangled_joint(qubit), require_symmetric=True)


@pytest.fixture(scope="session")
def faithful_qutrit(qutrit):
    return faithful.f_matrix(max_entangled_joint(qutrit), require_symmetric=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# reference qubit objects in the effect frame G_j = (I + sigma_j)/2
MIXED = np.array([1.0, 0.5, 0.5, 0.5])
KET0 = np.array([1.0, 0.5, 0.5, 1.0])
T_MIX = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0],
    ]
)
