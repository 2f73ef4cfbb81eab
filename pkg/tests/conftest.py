import numpy as np
import pytest

from cisea_mrfe.tensor import ParameterStore


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def store_with(**arrays) -> ParameterStore:
    """Build a ParameterStore from explicit float32 arrays."""
    store = ParameterStore()
    for name, arr in arrays.items():
        arr = np.asarray(arr, dtype=np.float32)
        store.add(name, arr.shape, init=arr)
    return store
