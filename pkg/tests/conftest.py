import numpy as np
import pytest

from qcorr.api.models import OptimizerConfig
from qcorr.core import states
from qcorr.core.densop import BipartiteDims, DensityMatrix, tensor_product, validate_density


@pytest.fixture
def fast_config() -> OptimizerConfig:
    """Small budget for unit tests; structured restart 0 does most of the work."""
    return OptimizerConfig(seed=7, restarts=2, max_iters=300, ansatz_terms=4)


@pytest.fixture
def bell_mixture_state() -> DensityMatrix:
    return states.bell_mixture(0.75)


@pytest.fixture
def pure_bell_state() -> DensityMatrix:
    return states.pure_bell()


@pytest.fixture
def product_state() -> DensityMatrix:
    rho_a = validate_density(np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]]))
    rho_b = validate_density(np.array([[0.4, 0.1j], [-0.1j, 0.6]]))
    return tensor_product(rho_a, rho_b)


@pytest.fixture
def two_qubits() -> BipartiteDims:
    return states.TWO_QUBITS
