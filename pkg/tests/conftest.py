import numpy as np
import pytest

from hermitesof.polynomials import PolyInS


def relerr(actual, expected):
    """Relative error against a nonzero reference value."""
    return abs(actual - expected) / abs(expected)


def random_numeric_poly(rng, degree):
    """Monic random polynomial with unit-scale coefficients."""
    coeffs = rng.standard_normal(degree + 1)
    coeffs[-1] = 1.0
    return PolyInS.from_numeric(coeffs)


def random_stable_poly(rng, degree):
    """Monic polynomial with all roots strictly in the left half-plane."""
    roots = []
    d = degree
    while d > 0:
        if d >= 2 and rng.random() < 0.5:
            re = -rng.uniform(0.1, 3.0)
            im = rng.uniform(0.1, 3.0)
            roots.extend([complex(re, im), complex(re, -im)])
            d -= 2
        else:
            roots.append(complex(-rng.uniform(0.1, 3.0), 0.0))
            d -= 1
    return PolyInS.from_roots(roots)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
