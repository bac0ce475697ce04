import numpy as np
import pytest

from qcpop import ControlAnsatz, QuantumSystem

H0_DIAG = (0.0, 0.515916, 1.0)
V_COUPLINGS = ((0.0, 0.707107, 0.0), (0.707107, 0.0, 1.0), (0.0, 1.0, 0.0))


@pytest.fixture(scope="session")
def transmon_system():
    """The 3-level scaled transmon pair used in all experiment-scale tests."""
    return QuantumSystem(
        h0=np.diag(H0_DIAG).astype(complex),
        v=np.array(V_COUPLINGS, dtype=complex),
    )


@pytest.fixture(scope="session")
def ansatz_t05():
    return ControlAnsatz(m=3, horizon=0.5)


from matrix_samples import (  # noqa: E402,F401  (re-export for fixtures)
    random_anti_hermitian_unit_radius,
    random_hermitian,
)
