import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plstab import (
    DomainError,
    GridFunction,
    SupportWindow,
    l1_distance,
    mass,
    normalize,
    scale_amplitude,
    sup_norm,
    tail_mass,
    translate,
)
from plstab.densities import exponential, gaussian, uniform
from plstab.grids import from_csv, resample, to_csv

from conftest import normal_cdf


def test_mass_zero_function():
    f = GridFunction(0.0, 0.1, np.zeros(16))
    assert mass(f) == 0.0


def test_mass_indicator():
    # indicator of [0,1] at dx = 1/1000, edges aligned
    dx = 1e-3
    xs = dx / 2 + dx * np.arange(1000)
    f = GridFunction(dx / 2, dx, np.ones_like(xs))
    assert mass(f) == pytest.approx(1.0, abs=dx)


def test_mass_gaussian(gauss_pi):
    # oracle: analytic integral of exp(-pi x^2) over R equals 1
    assert mass(gauss_pi) == pytest.approx(1.0, abs=1e-6)


def test_validation_errors():
    with pytest.raises(DomainError):
        GridFunction(0.0, -0.1, np.ones(4))
    with pytest.raises(DomainError):
        GridFunction(0.0, 0.1, np.array([1.0]))
    with pytest.raises(DomainError):
        GridFunction(0.0, 0.1, np.array([1.0, -2.0]))
    with pytest.raises(DomainError):
        GridFunction(0.0, 0.1, np.array([1.0, np.inf]))


def test_normalize_and_scale():
    f = GridFunction(0.0, 0.5, np.array([2.0, 2.0]))  # mass 2
    n = normalize(f)
    assert mass(n) == pytest.approx(1.0, abs=1e-12)
    assert mass(scale_amplitude(f, 3.0)) == pytest.approx(3.0 * mass(f), rel=1e-12)
    with pytest.raises(DomainError, match="zero mass"):
        normalize(GridFunction(0.0, 0.5, np.zeros(4)))


def test_translate_exact():
    f = gaussian(0.0, 1.0, -5, 5, 256)
    g = translate(f, 0.0)
    assert g.x0 == f.x0 and np.array_equal(g.values, f.values)
    s = 0.37
    h = translate(f, s)
    assert h.x0 == f.x0 + s
    assert mass(h) == mass(f)


def test_sup_norm_gaussian(gauss_pi):
    # 0 is a grid point, so the max value is exactly exp(0)
    assert sup_norm(gauss_pi) == pytest.approx(1.0, abs=1e-9)


def test_l1_identity(gauss_pi):
    assert l1_distance(gauss_pi, gauss_pi) == 0.0


def test_l1_normalized_indicators(uniform_pair):
    # oracle: int |1_(0,1) - 0.5 * 1_(0,2)| = 0.5 + 0.5 = 1
    f, g = uniform_pair
    assert l1_distance(f, g) == pytest.approx(1.0, abs=2 * f.dx)


def test_l1_shifted_normals():
    # oracle: densities cross at 0.05, distance = 4*Phi(0.05) - 2
    f = gaussian(0.0, 1.0, -8, 8, 8192)
    g = gaussian(0.1, 1.0, -8, 8, 8192)
    expected = 4.0 * normal_cdf(0.05) - 2.0
    assert l1_distance(f, g) == pytest.approx(expected, abs=1e-3)


def test_l1_mixed_grids():
    f = gaussian(0.0, 1.0, -8, 8, 4096)
    g = gaussian(0.0, 1.0, -7.5, 8.5, 3000)
    assert l1_distance(f, g) == pytest.approx(0.0, abs=2e-3)


def test_tail_mass():
    f = exponential(1.0, -1.0, 30.0, 8192)
    full = SupportWindow(0, f.n - 1)
    assert tail_mass(f, full) == 0.0
    empty = SupportWindow(2 * f.n, 2 * f.n + 1)
    assert tail_mass(f, empty) == pytest.approx(mass(f), rel=1e-12)
    # oracle: exponential tail beyond 3 is e^-3
    k = int(np.searchsorted(f.centers, 3.0))
    win = SupportWindow(0, k - 1)
    assert tail_mass(f, win) == pytest.approx(math.exp(-3.0), abs=1e-4)


def test_support_window_validation():
    with pytest.raises(DomainError):
        SupportWindow(5, 2)
    with pytest.raises(DomainError):
        SupportWindow(0, 1, threshold=-1.0)


def test_resample_identity(gauss_pi):
    g = resample(gauss_pi, gauss_pi.x0, gauss_pi.dx, gauss_pi.n)
    assert np.max(np.abs(g.values - gauss_pi.values)) <= 1e-12


grid_values = st.lists(st.floats(0.0, 10.0), min_size=4, max_size=48)


@given(grid_values, grid_values, grid_values)
@settings(max_examples=60, deadline=None)
def test_l1_triangle_inequality(a, b, c):
    n = min(len(a), len(b), len(c))
    fa = GridFunction(-1.0, 0.1, np.asarray(a[:n]))
    fb = GridFunction(-1.3, 0.17, np.asarray(b[:n]))
    fc = GridFunction(-0.7, 0.23, np.asarray(c[:n]))
    dab = l1_distance(fa, fb)
    dbc = l1_distance(fb, fc)
    dac = l1_distance(fa, fc)
    assert dac <= dab + dbc + 1e-9


@given(grid_values, st.floats(0.1, 5.0), st.floats(-3.0, 3.0))
@settings(max_examples=60, deadline=None)
def test_scale_translate_mass(vals, a, s):
    f = GridFunction(0.0, 0.25, np.asarray(vals))
    assert mass(scale_amplitude(f, a)) == pytest.approx(a * mass(f), rel=1e-12, abs=1e-300)
    assert mass(translate(f, s)) == mass(f)


def test_csv_roundtrip(tmp_path):
    f = uniform(0.0, 1.0, -2.0, 2.0, 128)
    path = tmp_path / "density.csv"
    to_csv(f, path)
    g = from_csv(path)
    assert g.x0 == f.x0
    assert g.dx == pytest.approx(f.dx, rel=1e-12)
    assert np.array_equal(g.values, f.values)


def test_csv_rejects_uneven_spacing(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,value\n0.0,1.0\n0.1,1.0\n0.25,1.0\n")
    with pytest.raises(DomainError, match="equally spaced"):
        from_csv(path)
