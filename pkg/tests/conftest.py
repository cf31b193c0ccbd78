import math

import numpy as np
import pytest

from plstab import GridFunction


@pytest.fixture
def gauss_pi():
    """exp(-pi x^2) sampled so that 0 is a grid point: unit mass, sup 1."""
    n = 4097
    dx = 12.0 / (n - 1)
    xs = -6.0 + dx * np.arange(n)
    return GridFunction(-6.0, dx, np.exp(-math.pi * xs ** 2))


@pytest.fixture
def uniform_pair():
    """The closed-form pair 1_(0,1) and (1/2) 1_(0,2) on an edge-aligned grid."""
    n = 4096
    dx = 4.0 / n
    x0 = -1.0 + 0.5 * dx
    xs = x0 + dx * np.arange(n)
    f = GridFunction(x0, dx, np.where((xs > 0) & (xs < 1), 1.0, 0.0))
    g = GridFunction(x0, dx, np.where((xs > 0) & (xs < 2), 0.5, 0.0))
    return f, g


def normal_cdf(x: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    return 0.5 * (1.0 + math.erf((x - mu) / (sigma * math.sqrt(2.0))))


def normal_quantile(p: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    import statistics

    return statistics.NormalDist(mu, sigma).inv_cdf(p)
