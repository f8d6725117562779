"""Independent numerical oracles used by the tests.

These deliberately avoid the library's FFT code paths: kernels are
evaluated by direct Gauss-Legendre quadrature of their Fourier profiles,
moments by exact band-limited sampling sums, and Holder exponents by
first-difference scans of the raw samples.
"""

import numpy as np

_GLN, _GLW = np.polynomial.legendre.leggauss(256)


def kernel_values_quadrature(spec, x, n_panels=8):
    """k(x) = (1/2pi) int profile(xi) e^{i x xi} d xi by GL panels.

    Exact (to quadrature accuracy ~1e-13) evaluation of the continuum,
    non-periodized kernel; the library's spatial values go through inverse
    FFT and periodization instead.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    supp = spec.support_radius
    edges = np.linspace(-supp, supp, n_panels + 1)
    total = np.zeros(len(x), dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        xi = (a + b) / 2 + (b - a) / 2 * _GLN
        w = _GLW * (b - a) / 2
        prof = np.asarray(spec.profile(xi), dtype=complex)
        total += np.exp(1j * np.outer(x, xi)) @ (prof * w)
    return total / (2 * np.pi)


def spatial_moment_sampling(spec, k, x_max, h=None):
    """int x^k kernel(x) dx by the exact sampling rule h*sum (nh)^k kernel(nh).

    For band-limited kernels (band <= support_radius) the sampling sum with
    h < 2 pi / (2 * support_radius) equals the integral exactly up to the
    |x| > x_max truncation tail; kernel values come from quadrature.
    """
    if h is None:
        h = np.pi / (2 * spec.support_radius)
    n_max = int(x_max / h)
    xs = h * np.arange(-n_max, n_max + 1)
    vals = kernel_values_quadrature(spec, xs)
    return complex(h * np.sum(xs**k * vals))


def holder_exponent_scan(u, j_lo=1, j_hi=8):
    """Slope of log sup_x |u(x + h) - u(x)| against log h over dyadic h.

    h runs over spacing * 2^j; for a Holder-s sample (0 < s < 1) the
    first-difference sup scales exactly like h^s.
    """
    vals = u.values.real
    hs, sups = [], []
    for j in range(j_lo, j_hi + 1):
        shift = 2**j
        diff = np.abs(np.roll(vals, -shift) - vals)
        hs.append(u.grid.spacing * shift)
        sups.append(np.max(diff))
    coef = np.polyfit(np.log(hs), np.log(sups), 1)
    return float(coef[0])


def quadrature_stabilized(fn, arg0, factor=2.0, rtol=1e-3, max_steps=3):
    """Evaluate fn(arg), doubling arg until consecutive values stabilize.

    Returns the last value; raises if no two consecutive evaluations agree
    to rtol (absolute fallback 1e-12).
    """
    prev = fn(arg0)
    arg = arg0
    for _ in range(max_steps):
        arg = arg * factor
        cur = fn(arg)
        if abs(cur - prev) <= max(rtol * abs(cur), 1e-12):
            return cur
        prev = cur
    raise AssertionError("quadrature did not stabilize")
