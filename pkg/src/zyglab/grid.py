"""Sampled signals on a periodic interval with Fourier-multiplier calculus.

Conventions, stated once and tested:
  * domain is [-L/2, L/2) with periodic identification, x_i = -L/2 + i*L/N;
  * frequencies xi_k = 2*pi*k/L in FFT ordering, k = 0..N/2-1, -N/2..-1;
  * forward FFT unnormalized, inverse divides by N, so for u(x) = e^{i xi_0 x}
    the multiplier m acts as m(xi_0) * u;
  * Parseval: mean(|u|^2) == sum(|u_hat|^2) / N^2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

REAL_FLAG_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: n_points samples of [-length/2, length/2)."""

    n_points: int
    length: float

    def __post_init__(self):
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")
        if not (self.length > 0 and np.isfinite(self.length)):
            raise ValueError(f"length must be positive and finite, got {self.length}")

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return -self.length / 2 + self.spacing * np.arange(self.n_points)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """xi_k = 2*pi*k/L in FFT ordering."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @property
    def nyquist(self) -> float:
        return np.pi / self.spacing


def make_grid(n_points: int, length: float) -> Grid:
    return Grid(n_points, float(length))


@dataclass(frozen=True)
class SampledSignal:
    """Complex samples on a Grid; is_real records a verified reality check."""

    grid: Grid
    values: np.ndarray
    is_real: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {values.shape} != ({self.grid.n_points},)"
            )
        object.__setattr__(self, "values", values)
        if self.is_real:
            scale = np.max(np.abs(values))
            if scale > 0 and np.max(np.abs(values.imag)) > REAL_FLAG_TOL * scale:
                raise ValueError("is_real set but imaginary part is not negligible")

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real

    def __add__(self, other: "SampledSignal") -> "SampledSignal":
        _check_same_grid(self, other)
        return SampledSignal(self.grid, self.values + other.values,
                             self.is_real and other.is_real)

    def __sub__(self, other: "SampledSignal") -> "SampledSignal":
        _check_same_grid(self, other)
        return SampledSignal(self.grid, self.values - other.values,
                             self.is_real and other.is_real)

    def __mul__(self, factor):
        if isinstance(factor, SampledSignal):
            _check_same_grid(self, factor)
            return SampledSignal(self.grid, self.values * factor.values,
                                 self.is_real and factor.is_real)
        c = complex(factor)
        return SampledSignal(self.grid, self.values * c,
                             self.is_real and c.imag == 0.0)

    __rmul__ = __mul__


def _check_same_grid(a: SampledSignal, b: SampledSignal):
    if a.grid != b.grid:
        raise ValueError("signals live on different grids")


def signal_from_function(grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> SampledSignal:
    vals = np.asarray(f(grid.x))
    is_real = bool(np.isrealobj(vals))
    return SampledSignal(grid, vals.astype(complex), is_real)


def constant_signal(grid: Grid, c: complex) -> SampledSignal:
    c = complex(c)
    return SampledSignal(grid, np.full(grid.n_points, c, dtype=complex),
                         c.imag == 0.0)


def _flag_real(values: np.ndarray) -> bool:
    scale = np.max(np.abs(values))
    if scale == 0.0:
        return True
    return np.max(np.abs(values.imag)) <= REAL_FLAG_TOL * scale


def apply_multiplier(u: SampledSignal, m: Callable[[np.ndarray], np.ndarray]) -> SampledSignal:
    """f(D)u realized as inverse-FFT(m(xi_k) * FFT(u))."""
    mult = np.asarray(m(u.grid.frequencies))
    if not np.all(np.isfinite(mult)):
        bad = u.grid.frequencies[~np.isfinite(mult)]
        raise ValueError(f"multiplier not finite at xi={bad[:3]}")
    out = np.fft.ifft(np.fft.fft(u.values) * mult)
    return SampledSignal(u.grid, out, u.is_real and _flag_real(out))


def convolve_scaled(u: SampledSignal, kernel, eps: float) -> SampledSignal:
    """u * k_eps with k_eps(y) = k(y/eps)/eps, via the multiplier k_hat(eps*xi).

    `kernel` is anything with a `profile(xi)` Fourier-domain evaluator
    (KernelSpec, Mollifier, Wavelet from zyglab.kernels).
    """
    if not (eps > 0):
        raise ValueError(f"eps must be positive, got {eps}")
    prof = getattr(kernel, "profile", kernel)
    return apply_multiplier(u, lambda xi: prof(eps * xi))


def window_mask(grid: Grid, window: tuple[float, float] | None) -> np.ndarray:
    if window is None:
        return np.ones(grid.n_points, dtype=bool)
    lo, hi = window
    if not (lo <= hi):
        raise ValueError(f"empty window {window}")
    mask = (grid.x >= lo) & (grid.x <= hi)
    if not mask.any():
        raise ValueError(f"window {window} contains no grid point")
    return mask


def sup_norm(u: SampledSignal, window: tuple[float, float] | None = None) -> float:
    """max |u| over grid points inside the window (whole grid if None)."""
    return float(np.max(np.abs(u.values[window_mask(u.grid, window)])))


def spectral_derivative(u: SampledSignal, order: int = 1) -> SampledSignal:
    """(i xi)^order multiplier; exact for band-limited periodic samples."""
    if order == 0:
        return u
    return apply_multiplier(u, lambda xi: (1j * xi) ** order)


# --- CSV interface: two columns x,value (or x,re,im), header, '.' decimal ---

def signal_to_csv(u: SampledSignal, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if u.is_real:
            w.writerow(["x", "value"])
            for xv, val in zip(u.grid.x, u.values.real):
                w.writerow([repr(float(xv)), repr(float(val))])
        else:
            w.writerow(["x", "re", "im"])
            for xv, val in zip(u.grid.x, u.values):
                w.writerow([repr(float(xv)), repr(float(val.real)), repr(float(val.imag))])


def signal_from_csv(path, length: float | None = None) -> SampledSignal:
    """Read a signal written by signal_to_csv.

    The grid length is inferred from the x column spacing unless given.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "x" or len(rows) < 2:
        raise ValueError(f"{path}: not a signal CSV (missing header)")
    header = rows[0]
    data = np.array([[float(c) for c in row] for row in rows[1:]])
    x = data[:, 0]
    n = len(x)
    spacing = x[1] - x[0]
    if length is None:
        length = spacing * n
    grid = Grid(n, float(length))
    if not np.allclose(grid.x, x, atol=1e-9 * length):
        raise ValueError(f"{path}: x column is not the canonical grid")
    if header[1:] == ["value"]:
        return SampledSignal(grid, data[:, 1].astype(complex), True)
    if header[1:] == ["re", "im"]:
        vals = data[:, 1] + 1j * data[:, 2]
        return SampledSignal(grid, vals, _flag_real(vals))
    raise ValueError(f"{path}: unrecognized columns {header}")
