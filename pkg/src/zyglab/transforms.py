"""Continuous wavelet transform, Littlewood-Paley analysis and decay fits.

Sign conventions for the fitted exponents:
  * decay_exponent fits log y against log e, so y ~ e^s gives exponent s
    (a delta comb, with sup|W| ~ 1/e, reports exactly -1);
  * besov_exponent fits log ||psi(D/t)u|| against log t and reports the
    NEGATED slope, i.e. block norms ~ t^-s give exponent s.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grid import Grid, SampledSignal, apply_multiplier, sup_norm
from .kernels import LPFamily, Wavelet
from .numerics import parallel_map

ZERO_FLOOR = 1e-30


class InsufficientDataError(ValueError):
    """Raised when a fit has fewer than the minimum usable points."""


@dataclass(frozen=True)
class ScaleGrid:
    """Geometric scales eps_max * q^j, j = 0..count-1, strictly decreasing."""

    eps_min: float
    eps_max: float
    count: int

    def __post_init__(self):
        if not (0 < self.eps_min < self.eps_max):
            raise ValueError("need 0 < eps_min < eps_max")
        if self.count < 12:
            raise ValueError("need at least 12 scales")

    @cached_property
    def scales(self) -> np.ndarray:
        q = (self.eps_min / self.eps_max) ** (1.0 / (self.count - 1))
        return self.eps_max * q ** np.arange(self.count)

    def validate_for(self, grid: Grid):
        if self.eps_min < 8 * grid.spacing:
            raise ValueError(
                f"eps_min {self.eps_min} below resolution 8*spacing = {8 * grid.spacing}"
            )

    def default_window(self) -> tuple[int, int]:
        """Fit window dropping the 2 largest and 2 smallest scales."""
        return (2, self.count - 3)


@dataclass(frozen=True)
class Scalogram:
    """W[j][i] = W_g u(x_i, eps_j) over a scale grid."""

    signal: SampledSignal
    wavelet: Wavelet
    scale_grid: ScaleGrid
    matrix: np.ndarray

    def __post_init__(self):
        expect = (self.scale_grid.count, self.signal.grid.n_points)
        if self.matrix.shape != expect:
            raise ValueError(f"matrix shape {self.matrix.shape} != {expect}")

    def row_sups(self, window: tuple[float, float] | None = None) -> np.ndarray:
        from .grid import window_mask

        mask = window_mask(self.signal.grid, window)
        return np.max(np.abs(self.matrix[:, mask]), axis=1)


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    intercept: float
    residual_rms: float
    fit_window: tuple[int, int]
    log_flag: bool

    def to_json_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "residual_rms": self.residual_rms,
            "window": [self.fit_window[0], self.fit_window[1]],
            "log_flag": self.log_flag,
        }


def cwt(u: SampledSignal, g: Wavelet, sg: ScaleGrid) -> Scalogram:
    """W_g u(., e) = u * conj(reflected g)_e, via the multiplier conj(g_hat(e xi)).

    For our even real profiles the conjugation is a no-op; for odd-order
    derivative wavelets it flips the sign, which sup-norm estimates ignore.
    """
    sg.validate_for(u.grid)
    uh = np.fft.fft(u.values)
    xi = u.grid.frequencies

    def row(eps):
        return np.fft.ifft(uh * np.conj(g.profile(eps * xi)))

    rows = parallel_map(row, sg.scales)
    return Scalogram(u, g, sg, np.array(rows))


def synthesis(s: Scalogram, g: Wavelet, r: float, R: float) -> SampledSignal:
    """M_g H = int_r^R H(., e) * g_e de/e, trapezoid in log e over the scalogram rows."""
    scales = s.scale_grid.scales
    sel = (scales >= r) & (scales <= R)
    if not np.any(sel):
        raise ValueError(f"no scales in [{r}, {R}]")
    eps = scales[sel][::-1]  # increasing
    rows = s.matrix[sel][::-1]
    v = np.log(eps)
    w = np.zeros(len(v))
    if len(v) > 1:
        dv = np.diff(v)
        w[0] = dv[0] / 2
        w[-1] = dv[-1] / 2
        w[1:-1] = (dv[:-1] + dv[1:]) / 2
    xi = s.signal.grid.frequencies
    acc = np.zeros(s.signal.grid.n_points, dtype=complex)
    for eps_j, row, w_j in zip(eps, rows, w):
        acc += np.fft.ifft(np.fft.fft(row) * g.profile(eps_j * xi)) * w_j
    out_real = s.signal.is_real and np.max(np.abs(acc.imag)) <= 1e-10 * max(
        np.max(np.abs(acc)), 1e-300)
    return SampledSignal(s.signal.grid, acc, bool(out_real))


def reconstruction_residual(u: SampledSignal, g: Wavelet, sg: ScaleGrid,
                            poly_degree: int = 0) -> float:
    """min over constants c of ||synthesis(cwt(u)) + c - u||_inf / ||u||_inf.

    On the torus the polynomial ambiguity of wavelet inversion is a
    constant, so only poly_degree = 0 is meaningful.
    """
    if poly_degree != 0:
        raise ValueError("on the torus the polynomial ambiguity is a constant")
    denom = np.max(np.abs(u.values))
    if denom == 0:
        raise ValueError("zero signal")
    rec = synthesis(cwt(u, g, sg), g, sg.eps_min, sg.eps_max)
    diff = rec.values - u.values
    # optimal constant shift in sup norm: midpoint of the residual range
    diff = diff - (diff.real.max() + diff.real.min()) / 2 - 1j * (
        diff.imag.max() + diff.imag.min()) / 2
    return float(np.max(np.abs(diff)) / denom)


def _lsq_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares y = a + b x; returns (b, a, rms residual)."""
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[1]), float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def decay_exponent(eps: np.ndarray, y: np.ndarray,
                   window: tuple[int, int] | None = None) -> DecayFit:
    """Fit log y vs log eps on the index window [lo, hi] (inclusive).

    Zero values (y <= 1e-30) are floored and excluded. The logarithmic
    branch is flagged when the model log y = a + c*log(log(1/eps)) explains
    the window at least twice as well as both the flat and the power fit
    while the power slope stays modest; then the exponent is reported as 0.
    """
    eps = np.asarray(eps, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = (0, len(eps) - 1)
    lo, hi = window
    if hi - lo + 1 < 4:
        raise InsufficientDataError(f"window {window} shorter than 4 points")
    sl = slice(lo, hi + 1)
    e_w = eps[sl]
    y_w = np.maximum(y[sl], ZERO_FLOOR)
    usable = y[sl] > ZERO_FLOOR
    if usable.sum() < 4:
        raise InsufficientDataError("fewer than 4 usable (nonzero) points in window")
    e_w, y_w = e_w[usable], y_w[usable]
    v = np.log(e_w)
    ly = np.log(y_w)
    slope, intercept, rms = _lsq_line(v, ly)
    rms_flat = float(np.sqrt(np.mean((ly - ly.mean()) ** 2)))

    log_flag = False
    if np.all(e_w < 1.0) and rms_flat > 1e-12 and abs(slope) < 0.5:
        llog = np.log(np.log(1.0 / e_w))
        _, _, rms_log = _lsq_line(llog, ly)
        if 2 * rms_log <= rms_flat and 2 * rms_log <= rms:
            log_flag = True
    if log_flag:
        return DecayFit(0.0, intercept, rms, window, True)
    return DecayFit(slope, intercept, rms, window, False)


def wavelet_decay_exponent(u: SampledSignal, g: Wavelet, sg: ScaleGrid,
                           window: tuple[int, int] | None = None,
                           x_window: tuple[float, float] | None = None) -> DecayFit:
    """Zygmund exponent estimate from sup_x |W_g u(x, e)| ~ e^s decay."""
    s = cwt(u, g, sg)
    if window is None:
        window = sg.default_window()
    return decay_exponent(sg.scales, s.row_sups(x_window), window)


def lp_block(u: SampledSignal, fam: LPFamily, t: float) -> SampledSignal:
    """psi(D/t)u: band-limited to t/2 <= |xi| <= t for the canonical pair."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return apply_multiplier(u, lambda xi: fam.psi.profile(xi / t))


def besov_exponent(u: SampledSignal, fam: LPFamily, t_grid: np.ndarray,
                   x_window: tuple[float, float] | None = None) -> DecayFit:
    """Littlewood-Paley estimate: fit log ||psi(D/t)u|| vs log t, exponent = -slope."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid * fam.psi.support_radius > u.grid.nyquist / 2):
        raise ValueError("t_grid exceeds the resolvable band (Nyquist/2)")
    sups = np.array([sup_norm(lp_block(u, fam, t), x_window) for t in t_grid])
    # relative floor: blocks at the FFT noise floor are empty, not small
    usable = sups > max(ZERO_FLOOR, 1e-12 * float(np.max(sups)))
    if usable.sum() < 4:
        raise InsufficientDataError(
            f"only {int(usable.sum())} nonzero Littlewood-Paley blocks; "
            "spectrum too sparse for a fit")
    slope, intercept, rms = _lsq_line(np.log(t_grid[usable]), np.log(sups[usable]))
    return DecayFit(-slope, intercept, rms, (0, len(t_grid) - 1), False)


def dyadic_besov_exponent(u: SampledSignal, fam: LPFamily, j_lo: int, j_hi: int,
                          x_window: tuple[float, float] | None = None) -> DecayFit:
    """Dyadic-block variant: fit log ||phi_j(D)u|| vs j*log 2 over j in [j_lo, j_hi].

    Robust for lacunary spectra, where continuous-t blocks land on band
    edges and scatter below the envelope.
    """
    if j_lo < 1:
        raise ValueError("j_lo must be >= 1 (j = 0 is the lowpass)")
    js = np.arange(j_lo, j_hi + 1)
    if 2.0 ** j_hi * fam.psi.support_radius > u.grid.nyquist:
        raise ValueError("dyadic range exceeds the resolvable band")
    sups = np.array([
        sup_norm(apply_multiplier(u, fam.dyadic_profile(int(j))), x_window)
        for j in js
    ])
    usable = sups > max(ZERO_FLOOR, 1e-12 * float(np.max(sups)))
    if usable.sum() < 4:
        raise InsufficientDataError("fewer than 4 nonzero dyadic blocks")
    slope, intercept, rms = _lsq_line(js[usable] * np.log(2.0), np.log(sups[usable]))
    return DecayFit(-slope, intercept, rms, (j_lo, j_hi), False)


def zygmund_seminorm(u: SampledSignal, fam: LPFamily, s: float,
                     t_grid: np.ndarray) -> float:
    """Discrete ||phi(D)u|| + max over t_grid of t^s ||psi(D/t)u||."""
    t_grid = np.asarray(t_grid, dtype=float)
    low = sup_norm(fam.phi_block(u))
    if len(t_grid) == 0:
        return low
    sups = np.array([sup_norm(lp_block(u, fam, t)) for t in t_grid])
    return float(low + np.max(t_grid**s * sups))


# --- exports ---

def scalogram_to_csv(s: Scalogram, path) -> None:
    """CSV matrix of |W|: header row of x values, first column of eps values."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["eps\\x"] + [repr(float(x)) for x in s.signal.grid.x])
        for eps_j, row in zip(s.scale_grid.scales, np.abs(s.matrix)):
            w.writerow([repr(float(eps_j))] + [repr(float(v)) for v in row])


def decay_fit_to_json(fit: DecayFit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fit.to_json_dict(), fh, indent=2)
        fh.write("\n")
