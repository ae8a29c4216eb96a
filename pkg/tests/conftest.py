import pytest

from peh.model import default_device
from peh.model.modal import reduce_device

SWEEP_LENGTHS = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30)


@pytest.fixture(scope="session")
def device_models():
    """Reduced models for the six study lengths (auto mode count)."""
    return {length: reduce_device(default_device(length)) for length in SWEEP_LENGTHS}


@pytest.fixture(scope="session")
def model_15cm(device_models):
    return device_models[0.15]
