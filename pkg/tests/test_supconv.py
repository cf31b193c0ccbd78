import math

import numpy as np
import pytest

from plstab import (
    DomainError,
    GridFunction,
    integral_curve,
    l1_distance,
    mass,
    midpoint_deficit,
    midpoint_interpolant,
    pl_deficit,
    scale_amplitude,
    sup_convolution,
    translate,
)
from plstab.densities import gaussian
from plstab.stability import random_log_concave_pair

UNIFORM_DEFICIT = (3.0 - 2.0 * math.sqrt(2.0)) / (2.0 * math.sqrt(2.0))


def test_t_domain_error(gauss_pi):
    with pytest.raises(DomainError):
        sup_convolution(gauss_pi, gauss_pi, 0.0)
    with pytest.raises(DomainError):
        sup_convolution(gauss_pi, gauss_pi, 1.0)


def test_equality_case(gauss_pi):
    res = sup_convolution(gauss_pi, gauss_pi, 0.3)
    err = np.max(np.abs(res.h.evaluate(gauss_pi.centers) - gauss_pi.values))
    assert err <= 1e-4
    assert pl_deficit(res.h, gauss_pi, gauss_pi, 0.3) == pytest.approx(0.0, abs=1e-4)


def test_translated_equality_case(gauss_pi):
    lam = 0.4
    g = translate(gauss_pi, 1.0)
    res = sup_convolution(gauss_pi, g, lam)
    target = translate(gauss_pi, 1.0 - lam)
    err = np.max(np.abs(res.h.evaluate(target.centers) - target.values))
    assert err <= 1e-4


def test_uniform_closed_form(uniform_pair):
    f, g = uniform_pair
    res = sup_convolution(f, g, 0.5)
    assert mass(res.h) == pytest.approx(3.0 / (2.0 * math.sqrt(2.0)), abs=1e-3)
    target = GridFunction(
        f.x0, f.dx, np.where((f.centers > 0) & (f.centers < 1.5), 1.0 / math.sqrt(2.0), 0.0)
    )
    assert l1_distance(res.h, target) <= 1e-3
    assert pl_deficit(res.h, f, g, 0.5) == pytest.approx(UNIFORM_DEFICIT, abs=1e-3)


def test_attained_points_feasible(uniform_pair):
    f, g = uniform_pair
    res = sup_convolution(f, g, 0.5)
    pos = res.h.values > 0
    assert np.all(np.isfinite(res.attained_x[pos]))


def test_supconv_condition_sampled():
    # the defining inequality holds at sampled decompositions up to the
    # piecewise-linear interpolation guard
    f, g = random_log_concave_pair(5, n=1024)
    lam = 0.35
    res = sup_convolution(f, g, lam)
    rng = np.random.default_rng(0)
    xs = rng.choice(f.centers, 400, p=f.values / f.values.sum())
    ys = rng.choice(g.centers, 400, p=g.values / g.values.sum())
    rhs = f.evaluate(xs) ** lam * g.evaluate(ys) ** (1.0 - lam)
    lhs = res.h.evaluate(lam * xs + (1.0 - lam) * ys)
    guard = float(np.percentile(np.abs(np.diff(res.h.values, 2)), 99)) / 8.0
    assert np.all(lhs >= rhs - 1e-6 * np.max(rhs) - guard)


def test_pl_inequality_random_pairs():
    for seed in range(10):
        f, g = random_log_concave_pair(seed, n=1024)
        for lam in (0.2, 0.5, 0.8):
            eps = pl_deficit(sup_convolution(f, g, lam).h, f, g, lam)
            assert eps >= -1e-6


def test_scaling_covariance():
    # the amplitude pair (a^-(1-lam), a^lam) is the one whose exponents cancel
    # in f^lam g^(1-lam) for every lam
    f, g = random_log_concave_pair(2, n=1024)
    for lam in (0.3, 0.5, 0.7):
        h1 = sup_convolution(f, g, lam).h
        a = 1.7
        h2 = sup_convolution(
            scale_amplitude(f, a ** -(1.0 - lam)), scale_amplitude(g, a ** lam), lam
        ).h
        assert np.max(np.abs(h1.values - h2.values)) <= 1e-10 * np.max(h1.values)


def test_translation_covariance():
    f, g = random_log_concave_pair(4, n=1024)
    t = 0.25
    h1 = sup_convolution(f, g, t).h
    h2 = sup_convolution(translate(f, 0.8), g, t).h
    assert h2.x0 == pytest.approx(h1.x0 + t * 0.8, abs=1e-12)
    assert np.max(np.abs(h1.values - h2.values)) <= 1e-9 * max(1.0, np.max(h1.values))


def test_non_log_concave_fallback():
    xs = np.linspace(-6, 6, 801)
    dx = 12 / 800
    bimodal = GridFunction(-6, dx, np.exp(-0.5 * (np.abs(xs) - 2.5) ** 2))
    res = sup_convolution(bimodal, bimodal, 0.5)
    # the sup-convolution fills the concave gap: deficit strictly positive
    eps = pl_deficit(res.h, bimodal, bimodal, 0.5)
    assert eps > 0.01
    rng = np.random.default_rng(1)
    xsmp = rng.uniform(-4, 4, 300)
    ysmp = rng.uniform(-4, 4, 300)
    rhs = np.sqrt(bimodal.evaluate(xsmp) * bimodal.evaluate(ysmp))
    lhs = res.h.evaluate(0.5 * (xsmp + ysmp))
    assert np.all(lhs >= rhs - 2e-2 * np.max(rhs))


def test_integral_curve_endpoints_and_concavity():
    f, g = random_log_concave_pair(7, n=2048)
    curve = integral_curve(f, g, [0.002, 0.02, 0.25, 0.5, 0.75, 0.98, 0.998])
    masses = [m for _, m in curve]
    # endpoints approach mass(g) as t -> 0 and mass(f) as t -> 1
    assert abs(masses[0] - mass(g)) < abs(masses[1] - mass(g))
    assert masses[0] == pytest.approx(mass(g), abs=0.05)
    assert abs(masses[-1] - mass(f)) < abs(masses[-2] - mass(f))
    assert masses[-1] == pytest.approx(mass(f), abs=0.05)
    lm = np.log(masses[2:-2])
    assert lm[0] - 2 * lm[1] + lm[2] <= 1e-3


def test_integral_curve_equal_inputs(gauss_pi):
    curve = integral_curve(gauss_pi, gauss_pi, [0.25, 0.5, 0.75])
    for _, m in curve:
        assert m == pytest.approx(1.0, abs=1e-4)


def test_integral_curve_validation(gauss_pi):
    with pytest.raises(DomainError):
        integral_curve(gauss_pi, gauss_pi, [0.5, 0.2])
    with pytest.raises(DomainError):
        integral_curve(gauss_pi, gauss_pi, [0.0, 0.5])


def test_midpoint_interpolant_identity(gauss_pi):
    w = midpoint_interpolant(gauss_pi, gauss_pi)
    assert l1_distance(w, gauss_pi) <= 1e-3


def test_midpoint_interpolant_uniform(uniform_pair):
    f, g = uniform_pair
    w = midpoint_interpolant(f, g)
    target = GridFunction(
        f.x0, f.dx, np.where((f.centers > 0) & (f.centers < 1.5), 1.0 / math.sqrt(2.0), 0.0)
    )
    assert l1_distance(w, target) <= 2e-3


def test_midpoint_interpolant_dominated(uniform_pair):
    f, g = uniform_pair
    w = midpoint_interpolant(f, g)
    h = sup_convolution(f, g, 0.5).h
    assert mass(w) <= mass(h) + 1e-6
    # pointwise domination up to one cell of interpolation slack
    zs = w.centers
    assert np.all(w.values <= h.evaluate(zs) + h.evaluate(zs - w.dx) + h.evaluate(zs + w.dx) + 1e-9)


def test_midpoint_chain_inequality():
    for seed in range(6):
        f, g = random_log_concave_pair(seed, n=1024)
        w = midpoint_interpolant(f, g)
        assert mass(w) >= 1.0 - midpoint_deficit(f, g) - 5e-3


def test_gaussian_variance_pair_cross_check():
    f = gaussian(0.0, 1.0, -9.0, 9.0, 8192)
    g = gaussian(0.0, 1.1, -9.0, 9.0, 8192)
    eps = pl_deficit(sup_convolution(f, g, 0.5).h, f, g, 0.5)
    # oracle: Gaussian sup-convolutions interpolate variances linearly,
    # mass(h_t) = sigma_t / (sigma_f^t sigma_g^(1-t)), sigma_t^2 = t sf^2 + (1-t) sg^2
    sigma_t = math.sqrt(0.5 * 1.0 ** 2 + 0.5 * 1.1 ** 2)
    expected = sigma_t / (1.0 ** 0.5 * 1.1 ** 0.5) - 1.0
    assert eps == pytest.approx(expected, abs=1e-5)
