import numpy as np
import pytest

from addm import backend


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger one tiny call per compiled kernel so timed tests never pay
    compilation cost."""
    u = np.ones(4, np.complex128)
    w = np.ones(4, np.complex128)
    backend.rank1_circulant(u, u, w)
    backend.kron_accumulate(np.zeros((4, 4), np.complex128), 1.0 + 0j,
                            np.eye(2, dtype=np.complex128), np.eye(2, dtype=np.complex128))
    backend.apply_paths(u, np.ones(1, np.complex128), np.zeros(1, np.int64),
                        np.zeros(1), 0.0)
    backend.io_window_sum(
        np.ones((2, 2), np.complex128),
        np.ones(1, np.complex128),
        np.ones((1, 2), np.complex128),
        np.ones((1, 2), np.complex128),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1, np.int64),
        np.zeros(1, np.int64),
        2,
        2,
    )
