import math

import numpy as np
import pytest

from ibmag import PowerLawCurve, fit_power_law


def two_point_oracle(x1, f1, x2, f2, p=2.0):
    """Closed-form (A, c) through two samples, independent of the fit code."""
    r = (f1 / f2) ** (1.0 / p)
    c = (x2 - r * x1) / (r - 1.0)
    return f1 * (x1 + c) ** p, c


def trapezoid_oracle(fn, a, b, n=100_000):
    xs = np.linspace(a, b, n)
    return float(np.trapezoid(fn(xs), xs))


def central_diff(fn, x, h=1e-4):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


# the small-prototype magnet curve: pinned endpoint forces 8.4 N at contact,
# 0.5 N at the 7.5 mm stroke, inverse-square family
SMALL_ENDPOINTS = [(0.0, 8.4), (7.5, 0.5)]
SMALL_STROKE = 7.5
A_SMALL, C_SMALL = two_point_oracle(0.0, 8.4, 7.5, 0.5)


@pytest.fixture(scope="session")
def small_curve() -> PowerLawCurve:
    return fit_power_law(SMALL_ENDPOINTS, p_fixed=2)


@pytest.fixture(scope="session")
def small_curve_oracle() -> PowerLawCurve:
    """Same curve built from the closed form computed here, not by the fitter."""
    return PowerLawCurve(A_SMALL, C_SMALL, 2.0)


def assert_rel(value, expected, rtol, msg=""):
    denom = max(abs(expected), 1e-300)
    assert abs(value - expected) / denom <= rtol, (
        f"{msg} value={value!r} expected={expected!r} "
        f"rel_err={abs(value - expected) / denom:.3e} > {rtol}")
