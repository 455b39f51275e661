import numpy as np
import pytest


def expm_scaling_squaring(a, order=16):
    """Independent matrix exponential: Taylor series + scaling and squaring.

    Deliberately avoids the eigendecomposition route used by the library so
    rotation matrices can be checked against a second method.
    """
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-30)))) + 1)
    scaled = a / (2.0 ** squarings)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ scaled / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
