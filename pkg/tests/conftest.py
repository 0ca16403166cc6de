import numpy as np
import pytest

from cwiener.rng import Stream

K = 4.0


@pytest.fixture
def stream(request):
    # one independent stream per test, keyed on the test name
    return Stream.from_seed(42, request.node.name)


def within_k(est, target, k=K, rel=0.0):
    return abs(est.value - target) <= max(k * est.std_error, rel * abs(target))
