import pytest

from gaugeflow import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT compile once so timed sections measure math, not compilation
    kernels.warmup()
    yield
