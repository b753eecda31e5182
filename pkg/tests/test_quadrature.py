import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import beta as beta_dist

from ratingdyn.quadrature import QuadratureError, beta_weighted_integral


def test_polynomial_exact_for_smooth_shapes():
    val, err = beta_weighted_integral(lambda r: r**3, 2.5, 1.5, 1e-10)
    # independent oracle: scipy.quad over the pdf
    ref, _ = quad(lambda r: r**3 * beta_dist.pdf(r, 2.5, 1.5), 0, 1)
    assert val == pytest.approx(ref, abs=1e-9)
    assert err <= 1e-10


def test_endpoint_singularities_do_not_degrade_accuracy():
    # alpha, beta < 1: pdf diverges at both endpoints
    val, _ = beta_weighted_integral(lambda r: r**2, 0.3, 0.3, 1e-12)
    assert val == pytest.approx(0.40625, abs=1e-12)


def test_kinked_integrand_with_breakpoint():
    val, err = beta_weighted_integral(lambda r: np.abs(r - 0.7), 3.0, 1.0, 1e-12, breakpoints=(0.7,))
    assert val == pytest.approx(0.17005, abs=1e-12)
    assert err <= 1e-12


def test_kinked_integrand_without_breakpoint_still_converges():
    val, _ = beta_weighted_integral(lambda r: np.abs(r - 0.7), 3.0, 1.0, 1e-9)
    assert val == pytest.approx(0.17005, abs=1e-9)


def test_jump_discontinuity_still_converges_by_bisection():
    jump = 1.0 / np.sqrt(2.0)
    val, _ = beta_weighted_integral(lambda r: (r > jump).astype(float), 1.0, 1.0, 1e-12)
    assert val == pytest.approx(1.0 - jump, abs=1e-12)


def test_unreachable_tolerance_is_reported():
    # oscillation far beyond the refinement budget cannot be silently returned
    with pytest.raises(QuadratureError):
        beta_weighted_integral(lambda r: np.sin(3e5 * r), 1.0, 1.0, 1e-10)


def test_invalid_tolerance():
    with pytest.raises(ValueError):
        beta_weighted_integral(lambda r: r, 1.0, 1.0, 0.0)
