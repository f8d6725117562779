import os

import numpy as np
import pytest

import zyglab as z
from oracles import kernel_values_quadrature


def test_make_grid_fields():
    g = z.make_grid(16, 1.0)
    assert g.spacing == 0.0625
    assert g.spacing * g.n_points == g.length
    g2 = z.make_grid(2**14, 2 * np.pi)
    assert g2.spacing == 2 * np.pi / 16384


@pytest.mark.parametrize("n, length", [(15, 1.0), (8, 1.0), (1000, 1.0),
                                       (64, 0.0), (64, -2.0)])
def test_make_grid_rejects(n, length):
    with pytest.raises(ValueError):
        z.make_grid(n, length)


def test_frequencies_symmetric_but_nyquist():
    g = z.make_grid(64, 2 * np.pi)
    f = np.sort(g.frequencies)
    # one unpaired Nyquist bin, the rest symmetric about 0
    assert f[0] == -32
    assert np.all(f[1:] == -f[1:][::-1])


def test_identity_multiplier(grid_2pi):
    u = z.signal_from_function(grid_2pi, lambda x: np.cos(3 * x) + 0.5 * np.sin(7 * x))
    v = z.apply_multiplier(u, lambda xi: np.ones_like(xi))
    assert np.max(np.abs(v.values - u.values)) <= 1e-12


def test_bandpass_kills_pure_tone():
    g = z.make_grid(2**10, 2 * np.pi)
    u = z.signal_from_function(g, lambda x: np.cos(2 * x))
    v = z.apply_multiplier(u, lambda xi: (np.abs(xi) <= 1).astype(float))
    assert np.max(np.abs(v.values)) <= 1e-12


def test_spectral_derivative_of_tone(grid_2pi):
    u = z.signal_from_function(grid_2pi, np.sin)
    v = z.apply_multiplier(u, lambda xi: 1j * xi)
    assert np.max(np.abs(v.values - np.cos(grid_2pi.x))) <= 1e-10
    assert v.is_real


def test_multiplier_rejects_nonfinite(grid_2pi):
    u = z.signal_from_function(grid_2pi, np.cos)
    with pytest.raises(ValueError, match="not finite"):
        z.apply_multiplier(u, lambda xi: 1.0 / xi)


def test_multiplier_composition(grid_2pi):
    u = z.signal_from_function(grid_2pi, lambda x: np.cos(5 * x) + np.sin(2 * x))
    m1 = lambda xi: np.exp(-xi**2 / 100)
    m2 = lambda xi: 1j * xi * np.exp(-np.abs(xi) / 10)
    two = z.apply_multiplier(z.apply_multiplier(u, m1), m2)
    one = z.apply_multiplier(u, lambda xi: m1(xi) * m2(xi))
    scale = np.max(np.abs(one.values))
    assert np.max(np.abs(two.values - one.values)) <= 1e-12 * scale


def test_parseval_convention(grid_2pi):
    u = z.signal_from_function(grid_2pi, lambda x: np.cos(3 * x) + 0.2 * np.sin(11 * x))
    uh = np.fft.fft(u.values)
    n = grid_2pi.n_points
    assert np.mean(np.abs(u.values) ** 2) == pytest.approx(
        np.sum(np.abs(uh) ** 2) / n**2, rel=1e-12)


def test_convolve_preserves_constants(rho, grid_2pi):
    u = z.constant_signal(grid_2pi, 2.5)
    for eps in (0.01, 0.1, 0.5):
        v = z.convolve_scaled(u, rho, eps)
        assert np.max(np.abs(v.values - 2.5)) <= 1e-12


def test_convolve_tone_eigenfunction(rho, grid_2pi):
    xi0 = 6.0
    u = z.complex_tone(grid_2pi, xi0)
    for eps in (0.05, 0.13):
        v = z.convolve_scaled(u, rho, eps)
        expected = rho.profile(np.array([eps * xi0]))[0] * u.values
        assert np.max(np.abs(v.values - expected)) <= 1e-10


def test_convolve_delta_gives_kernel(rho):
    # periodization tail of the kernel decays like exp(-c sqrt(x)); the wide
    # domain keeps it below the 1e-6 relative budget at eps = 0.05
    g = z.make_grid(2**13, 32.0)
    assert 8 * g.spacing <= 0.05
    u = z.delta_comb(g)
    eps = 0.05
    v = z.convolve_scaled(u, rho, eps)
    direct = kernel_values_quadrature(rho.spec, g.x / eps).real / eps
    sup = np.max(np.abs(direct))
    assert np.max(np.abs(v.values.real - direct)) <= 1e-6 * sup


def test_convolve_rejects_bad_eps(rho, grid_2pi):
    u = z.constant_signal(grid_2pi, 1.0)
    with pytest.raises(ValueError):
        z.convolve_scaled(u, rho, 0.0)
    with pytest.raises(ValueError):
        z.convolve_scaled(u, rho, -0.1)


def test_convolve_linear_and_commutes(rho, grid_2pi):
    u = z.signal_from_function(grid_2pi, lambda x: np.cos(4 * x))
    v = z.signal_from_function(grid_2pi, lambda x: np.sin(9 * x))
    lhs = z.convolve_scaled(2.0 * u + v, rho, 0.07)
    rhs = 2.0 * z.convolve_scaled(u, rho, 0.07) + z.convolve_scaled(v, rho, 0.07)
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12
    m = lambda xi: np.exp(1j * xi / 50)
    a = z.apply_multiplier(z.convolve_scaled(u, rho, 0.07), m)
    b = z.convolve_scaled(z.apply_multiplier(u, m), rho, 0.07)
    assert np.max(np.abs(a.values - b.values)) <= 1e-12


def test_real_closure(rho, grid_2pi):
    u = z.signal_from_function(grid_2pi, lambda x: np.cos(4 * x) + np.sin(x))
    assert u.is_real
    v = z.convolve_scaled(u, rho, 0.1)
    assert v.is_real


def test_sup_norm_examples():
    g = z.make_grid(2**12, 2 * np.pi)
    assert z.sup_norm(z.constant_signal(g, 0.0)) == 0.0
    u = z.signal_from_function(g, np.sin)
    assert abs(z.sup_norm(u) - 1.0) <= 1e-3
    g1 = z.make_grid(2**10, 1.0)
    ident = z.signal_from_function(g1, lambda x: x)
    val = z.sup_norm(ident, (0.0, 0.25))
    assert abs(val - 0.25) <= g1.spacing


def test_sup_norm_empty_window(grid_2pi):
    u = z.signal_from_function(grid_2pi, np.cos)
    with pytest.raises(ValueError, match="window"):
        z.sup_norm(u, (1.0, 1.0 + 1e-9))


def test_csv_roundtrip_real(tmp_path, grid_2pi):
    u = z.cusp(0.3, grid_2pi)
    path = tmp_path / "sig.csv"
    z.signal_to_csv(u, path)
    back = z.signal_from_csv(path)
    assert back.grid == u.grid
    assert back.is_real
    assert np.array_equal(back.values, u.values)


def test_csv_roundtrip_complex(tmp_path):
    g = z.make_grid(64, 2 * np.pi)
    u = z.complex_tone(g, 3.0)
    path = tmp_path / "sig.csv"
    z.signal_to_csv(u, path)
    back = z.signal_from_csv(path)
    assert np.array_equal(back.values, u.values)


def test_csv_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("not,a,signal\n1,2,3\n")
    with pytest.raises(ValueError):
        z.signal_from_csv(path)
