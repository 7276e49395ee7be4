import numpy as np
import pytest

from floqmbl import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20211213)


def _backend_params():
    names = kernels.available_backends()
    return [pytest.param(kernels.get_backend(n), id=n) for n in names]


@pytest.fixture(params=_backend_params())
def kernel_backend(request):
    return request.param
