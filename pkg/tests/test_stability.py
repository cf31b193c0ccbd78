import math

import numpy as np
import pytest

from plstab import (
    CounterexampleConfig,
    DomainError,
    GridFunction,
    aligned_l1_distance,
    counterexample_family,
    exponent_fit,
    full_deficit_report,
    general_lambda_reduction,
    l1_distance,
    mass,
    normalize,
    pl_deficit,
    radial_counterexample_family,
    scale_amplitude,
    stability_distance,
    sup_convolution,
    translate,
)
from plstab.densities import gaussian, standard_gaussian_pi
from plstab.stability import (
    ReductionCheckError,
    near_equality_pair,
    random_log_concave,
    random_log_concave_pair,
    tau_scaling_probe,
)

from conftest import normal_cdf


# ---------------------------------------------------------------------------
# aligned distances


def test_aligned_identity(gauss_pi):
    d, s, a = aligned_l1_distance(gauss_pi, gauss_pi)
    assert d <= 1e-9 and abs(s) <= gauss_pi.dx / 4 and a == 1.0


def test_aligned_pure_shift(gauss_pi):
    u = translate(gauss_pi, 3.0)
    d, s, a = aligned_l1_distance(u, gauss_pi)
    assert d <= 1e-6
    assert s == pytest.approx(3.0, abs=gauss_pi.dx)
    assert a == 1.0


def test_aligned_variance_pair_quadrature_oracle():
    # oracle: N(0,1) vs N(0,1.2^2) cross at x* with x*^2 = log(1.44)/(1/2 - 1/2.88),
    # distance = 4*(Phi(x*) - Phi(x*/1.2)), evaluated by the normal CDF
    u = gaussian(0.0, 1.0, -10.0, 10.0, 8192)
    v = gaussian(0.0, 1.2, -10.0, 10.0, 8192)
    xstar = math.sqrt(math.log(1.2) / (0.5 - 1.0 / 2.88))
    expected = 4.0 * (normal_cdf(xstar) - normal_cdf(xstar / 1.2))
    d, s, a = aligned_l1_distance(u, v)
    assert a == 1.0
    assert abs(s) <= 4 * u.dx
    assert d == pytest.approx(expected, abs=2e-3)


def test_aligned_scale_recovers_amplitude(gauss_pi):
    u = scale_amplitude(gauss_pi, 1.4)
    d, s, a = aligned_l1_distance(u, gauss_pi, optimize_scale=True)
    assert d <= 1e-6
    assert a == pytest.approx(1.4, rel=1e-3)


# ---------------------------------------------------------------------------
# stability distances


def equality_triple(lam, shift, amp, n=4096):
    h = standard_gaussian_pi(-8.0, 8.0, n)
    u = (1.0 - lam) * shift
    w = -lam * shift
    f = scale_amplitude(translate(h, u), amp ** -(1.0 - lam))
    g = scale_amplitude(translate(h, w), amp ** lam)
    return f, g, h


@pytest.mark.parametrize("lam", [0.3, 0.5, 0.7])
def test_stability_distance_equality_family(lam):
    f, g, h = equality_triple(lam, shift=0.8, amp=1.3)
    rep = stability_distance(f, g, h, lam)
    assert abs(rep.epsilon) <= 1e-6
    assert rep.distance_f <= 1e-3
    assert rep.distance_g <= 1e-3
    assert rep.distance_h <= 1e-3
    assert rep.tau == min(lam, 1.0 - lam)


def test_stability_distance_uniform_pair(uniform_pair):
    f, g = uniform_pair
    h = sup_convolution(f, g, 0.5).h
    rep = stability_distance(f, g, h, 0.5)
    eps = rep.epsilon
    bound = 20.0 * math.sqrt(eps / 0.5)
    assert rep.distance_f + rep.distance_g + rep.distance_h <= bound
    assert rep.distance_f >= 0.2  # the pair is genuinely far from common shape


def test_stability_distance_hulled_inputs():
    # non-log-concave f goes through its hull before the witness is built
    xs = np.linspace(-6, 6, 2049)
    f = GridFunction(-6, 12 / 2048, np.exp(-0.5 * xs ** 2) * (1.0 + 0.3 * (np.abs(xs) > 1)))
    g = gaussian(0.0, 1.0, -6.0, 6.0, 2049)
    h = sup_convolution(f, g, 0.5).h
    rep = stability_distance(f, g, h, 0.5)
    assert np.isfinite(rep.distance_f + rep.distance_g + rep.distance_h)


def test_stability_report_constant_near_equality():
    worst = 0.0
    for seed, lam in ((1, 0.25), (2, 0.5), (3, 0.1)):
        f, g = near_equality_pair(seed, 0.05)
        h = sup_convolution(f, g, lam).h
        rep = stability_distance(f, g, h, lam)
        eps = max(rep.epsilon, 1e-12)
        worst = max(
            worst,
            (rep.distance_f + rep.distance_g + rep.distance_h)
            / math.sqrt(eps / rep.tau),
        )
    assert worst <= 20.0


# ---------------------------------------------------------------------------
# counterexample family


def test_counterexample_zero_delta_limit():
    res = counterexample_family(CounterexampleConfig(delta=1e-6, t=0.5, grid_n=2048))
    assert res.epsilon == pytest.approx(0.0, abs=1e-6)
    assert res.distance == pytest.approx(0.0, abs=1e-5)


def test_counterexample_quadratic_scaling():
    r1 = counterexample_family(CounterexampleConfig(delta=0.05, t=0.5, grid_n=2048))
    r2 = counterexample_family(CounterexampleConfig(delta=0.1, t=0.5, grid_n=2048))
    assert r2.epsilon / r1.epsilon == pytest.approx(4.0, abs=0.3)
    assert r1.distance / 0.05 == pytest.approx(r2.distance / 0.1, rel=0.05)
    assert 0.01 <= r1.distance / 0.05 <= 1.0


def test_counterexample_perturbation_is_mass_neutral():
    res = counterexample_family(CounterexampleConfig(delta=0.1, t=0.5, grid_n=2048))
    assert mass(res.f) == pytest.approx(1.0, abs=1e-12)
    assert mass(res.g) == pytest.approx(1.0, abs=1e-12)


def test_counterexample_rejects_bad_delta():
    with pytest.raises(DomainError):
        CounterexampleConfig(delta=0.6, t=0.5)
    with pytest.raises(DomainError):
        CounterexampleConfig(delta=0.05, t=1.5)


def test_radial_counterexample_zero_delta():
    cfg = CounterexampleConfig(delta=1e-6, t=0.5, grid_n=2048, phi_id="even_radial")
    res = radial_counterexample_family(cfg, 2)
    assert res.epsilon == pytest.approx(0.0, abs=1e-6)
    assert res.distance == pytest.approx(0.0, abs=1e-5)


def test_radial_counterexample_scaling():
    cfg1 = CounterexampleConfig(delta=0.04, t=0.5, grid_n=2048, phi_id="even_radial")
    cfg2 = CounterexampleConfig(delta=0.08, t=0.5, grid_n=2048, phi_id="even_radial")
    r1 = radial_counterexample_family(cfg1, 2)
    r2 = radial_counterexample_family(cfg2, 2)
    assert r2.epsilon / r1.epsilon == pytest.approx(4.0, abs=0.4)


# ---------------------------------------------------------------------------
# exponent fits


def test_exponent_fit_exact_power_law():
    eps = [1e-4, 1e-3, 1e-2, 1e-1, 1.0]
    pts = [(e, e ** 0.5) for e in eps]
    slope, intercept, r2 = exponent_fit(pts)
    assert slope == pytest.approx(0.5, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_exponent_fit_constant_distances():
    pts = [(e, 2.0) for e in (1e-3, 1e-2, 1e-1)]
    slope, intercept, r2 = exponent_fit(pts)
    assert slope == pytest.approx(0.0, abs=1e-12)


def test_exponent_fit_validation():
    with pytest.raises(DomainError):
        exponent_fit([(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(DomainError):
        exponent_fit([(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)])


# ---------------------------------------------------------------------------
# tau probe and lambda reduction


def test_tau_probe_symmetry_and_consistency():
    rows = tau_scaling_probe([0.3, 0.5, 0.7], delta=0.05, grid_n=2048)
    by_t = {round(r.t, 3): r for r in rows}
    assert by_t[0.3].tau == pytest.approx(by_t[0.7].tau, abs=1e-12)
    assert abs(by_t[0.3].ratio - by_t[0.7].ratio) <= 0.2 * by_t[0.3].ratio
    direct = counterexample_family(CounterexampleConfig(delta=0.05, t=0.5, grid_n=2048))
    assert by_t[0.5].epsilon == pytest.approx(direct.epsilon, rel=1e-12)
    assert by_t[0.5].distance == pytest.approx(direct.distance, rel=1e-12)


def test_general_lambda_reduction_equal_inputs(gauss_pi):
    bound, direct = general_lambda_reduction(gauss_pi, gauss_pi, 0.25)
    assert bound == pytest.approx(0.0, abs=1e-6)
    assert direct == pytest.approx(0.0, abs=1e-6)


def test_general_lambda_reduction_uniform_pair(uniform_pair):
    f, g = uniform_pair
    bound, direct = general_lambda_reduction(f, g, 0.25)
    expected = (3.0 - 2.0 * math.sqrt(2.0)) / (2.0 * math.sqrt(2.0))
    assert direct == pytest.approx(expected, abs=1e-3)
    assert direct <= bound + 1e-6


def test_general_lambda_reduction_gaussian_pair():
    f = gaussian(0.0, 1.0, -9.0, 9.0, 4096)
    g = gaussian(0.0, 1.3, -9.0, 9.0, 4096)
    bound, direct = general_lambda_reduction(f, g, 0.1)
    assert direct <= bound + 1e-6


def test_full_deficit_report_fields():
    f, g = random_log_concave_pair(4, n=1024)
    rep = full_deficit_report(f, g, 0.25)
    assert rep.tau == 0.25
    assert rep.epsilon >= rep.transport_deficit * 0.98 - 1e-8
    assert rep.bad_set_measure >= 0.0
    x1, x2 = rep.tail_cut
    assert x1 < x2


# ---------------------------------------------------------------------------
# generators


def test_random_log_concave_is_log_concave():
    from plstab import is_log_concave

    for seed in range(10):
        f = random_log_concave(seed)
        assert is_log_concave(f)[0]
        assert mass(f) == pytest.approx(1.0, rel=1e-9)


def test_generator_determinism():
    a = random_log_concave(123)
    b = random_log_concave(123)
    assert np.array_equal(a.values, b.values)
