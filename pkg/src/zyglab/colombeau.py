"""Regularization nets and the generalized Zygmund-regularity classifier.

A net is a family e -> u_e of sampled signals together with an exact
derivative rule. Derivatives are never taken by naive spectral calculus on
formula nets (their samples are not periodic); instead every net kind
carries its own rule:

  * embedded nets are band-limited and periodic, so spectral derivatives
    of the base signal are exact;
  * formula nets use closed-form derivatives;
  * products use the Leibniz rule over their factors.

The classifier turns a table of sup-norms ||d^k u_e||_{L_inf(K)} into
per-order decay classes {bounded, logarithmic, power, zero} and aggregates
the admissible regularity exponent. A net satisfies the three-branch growth
bounds for exponent s exactly when every power-class order k has
slope + k >= s, so the reported s_hat is the minimum of slope + k over
power-class orders (+inf when everything is bounded). The spread of
slope + k across orders is reported: embedded distributions produce tight,
constant values, while slack or drifting values show up in the spread and
the consistency flag.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import (Grid, SampledSignal, constant_signal, convolve_scaled,
                   spectral_derivative, sup_norm, window_mask)
from .kernels import Mollifier
from .numerics import parallel_map
from .transforms import ScaleGrid, decay_exponent, InsufficientDataError, ZERO_FLOOR

MODERATE_EXPONENT = 20.0  # moderateness proxy: norms <= eps^-20 everywhere
BOUNDED_SLOPE_TOL = 0.05
BOUNDED_ORDER_MARGIN = 0.1
LOG_ORDER_TOL = 0.25
CONSISTENT_SPREAD_TOL = 0.25


class Net:
    """A representative (u_e)_e on a grid with a compact window K."""

    def __init__(self, grid: Grid, window: tuple[float, float], label: str,
                 evaluate_fn: Callable[[float], SampledSignal],
                 derivative_fn: Callable[[float, int], SampledSignal]):
        self.grid = grid
        self.window = window
        self.label = label
        self._evaluate = evaluate_fn
        self._derivative = derivative_fn

    def evaluate(self, eps: float) -> SampledSignal:
        if not (0 < eps <= 1):
            raise ValueError(f"eps must lie in (0, 1], got {eps}")
        return self._evaluate(eps)

    def derivative(self, eps: float, k: int) -> SampledSignal:
        if k == 0:
            return self.evaluate(eps)
        return self._derivative(eps, k)

    def __repr__(self):
        return f"Net({self.label!r})"


def default_window(grid: Grid) -> tuple[float, float]:
    """Central half of the domain; dodges cutoff artifacts near the seam."""
    return (-grid.length / 4, grid.length / 4)


def embed(u: SampledSignal, rho: Mollifier, sg: ScaleGrid,
          window: tuple[float, float] | None = None) -> Net:
    """iota_0(u): the net (u * rho_e)_e; band-limited to |xi| <= supp/e."""
    sg.validate_for(u.grid)
    if window is None:
        window = default_window(u.grid)

    def evaluate(eps):
        return convolve_scaled(u, rho, eps)

    def derivative(eps, k):
        return spectral_derivative(convolve_scaled(u, rho, eps), k)

    return Net(u.grid, window, f"embed({rho.spec.kind})", evaluate, derivative)


def _signal(grid, values):
    vals = np.asarray(values)
    is_real = bool(np.isrealobj(vals))
    return SampledSignal(grid, vals.astype(complex), is_real)


def formula_net(kind: str, grid: Grid, window: tuple[float, float] | None = None,
                **params) -> Net:
    """Closed-formula nets with analytic derivatives.

    kinds: eps_pow_sine(s), scaled_smooth(f_derivs, r), scaled_poly(coeffs, r),
    lorentz(), generalized_const(c_fn).
    """
    if window is None:
        window = default_window(grid)
    x = grid.x

    if kind == "eps_pow_sine":
        s = float(params.pop("s"))

        def derivative(eps, k):
            return _signal(grid, eps ** (s - k) * np.sin(x / eps + k * np.pi / 2))

        return Net(grid, window, f"eps_pow_sine({s})",
                   lambda eps: derivative(eps, 0), derivative)

    if kind == "scaled_smooth":
        f_derivs = params.pop("f_derivs")  # (y: array, k: int) -> array
        r = float(params.pop("r"))
        name = params.pop("name", "f")

        def derivative(eps, k):
            return _signal(grid, eps ** (-r * k) * f_derivs(x / eps**r, k))

        return Net(grid, window, f"scaled_smooth({name}, r={r})",
                   lambda eps: derivative(eps, 0), derivative)

    if kind == "scaled_poly":
        coeffs = params.pop("coeffs")  # increasing powers
        r = float(params.pop("r"))
        poly = np.polynomial.Polynomial(coeffs)

        def derivative(eps, k):
            return _signal(grid, eps ** (-r * k) * poly.deriv(k)(x / eps**r))

        return Net(grid, window, f"scaled_poly(deg={poly.degree()}, r={r})",
                   lambda eps: derivative(eps, 0), derivative)

    if kind == "lorentz":
        def derivative(eps, k):
            # d^k/dx^k of e/(e+x^2) = (-1)^k k! sqrt(e) Im[(x - i sqrt(e))^-(k+1)]
            root = math.sqrt(eps)
            vals = (-1.0) ** k * math.factorial(k) * root * np.imag(
                (x - 1j * root) ** (-(k + 1)))
            return _signal(grid, vals)

        return Net(grid, window, "lorentz",
                   lambda eps: derivative(eps, 0), derivative)

    if kind == "generalized_const":
        c_fn = params.pop("c_fn")

        def evaluate(eps):
            return constant_signal(grid, c_fn(eps))

        def derivative(eps, k):
            return constant_signal(grid, 0.0)

        return Net(grid, window, params.pop("name", "generalized_const"),
                   evaluate, derivative)

    raise ValueError(f"unknown formula net kind {kind!r}")


def product_net(a: Net, b: Net) -> Net:
    """Pointwise product per eps; derivatives by the Leibniz rule."""
    if a.grid != b.grid:
        raise ValueError("nets live on different grids")
    window = (max(a.window[0], b.window[0]), min(a.window[1], b.window[1]))

    def evaluate(eps):
        return a.evaluate(eps) * b.evaluate(eps)

    def derivative(eps, k):
        acc = np.zeros(a.grid.n_points, dtype=complex)
        for j in range(k + 1):
            acc += math.comb(k, j) * (
                a.derivative(eps, j).values * b.derivative(eps, k - j).values)
        real = bool(np.max(np.abs(acc.imag)) <= 1e-10 * max(np.max(np.abs(acc)), 1e-300))
        return SampledSignal(a.grid, acc, real)

    return Net(a.grid, window, f"({a.label})*({b.label})", evaluate, derivative)


def derivative_net(a: Net, k: int) -> Net:
    """d^k a, realized by shifting the derivative order."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return Net(a.grid, a.window, f"d^{k}({a.label})",
               lambda eps: a.derivative(eps, k),
               lambda eps, j: a.derivative(eps, j + k))


@dataclass(frozen=True)
class GrowthTable:
    """norms[k][j] = ||d^k u_{e_j}||_{L_inf(K)} for k = 0..max_order."""

    max_order: int
    scale_grid: ScaleGrid
    norms: np.ndarray
    window: tuple[float, float]
    label: str = ""

    def __post_init__(self):
        expect = (self.max_order + 1, self.scale_grid.count)
        if self.norms.shape != expect:
            raise ValueError(f"norms shape {self.norms.shape} != {expect}")


def growth_profile(net: Net, max_order: int, sg: ScaleGrid) -> GrowthTable:
    """Tabulate local sup-norms of derivatives over (order, scale).

    Non-finite values (the net blows up past float range) are recorded as
    +inf; classification reports such tables as not moderate.
    """
    if not (0 <= max_order <= 8):
        raise ValueError("max_order must be in 0..8")
    mask = window_mask(net.grid, net.window)

    def column(eps):
        col = np.empty(max_order + 1)
        for k in range(max_order + 1):
            with np.errstate(over="ignore", invalid="ignore"):
                vals = net.derivative(eps, k).values[mask]
                m = np.max(np.abs(vals))
            col[k] = m if np.isfinite(m) else np.inf
        return col

    cols = parallel_map(column, sg.scales)
    return GrowthTable(max_order, sg, np.array(cols).T, net.window, net.label)


@dataclass(frozen=True)
class OrderClass:
    order: int
    slope: float | None
    decay_class: str  # bounded | logarithmic | power | zero
    s_k: float | None
    residual_rms: float | None

    def to_json_dict(self):
        return {"order": self.order, "slope": self.slope,
                "class": self.decay_class, "s_k": self.s_k,
                "residual_rms": self.residual_rms}


@dataclass(frozen=True)
class RegularityReport:
    s_hat: float  # +inf sentinel when all orders are bounded
    per_order: tuple[OrderClass, ...]
    consistency_spread: float
    moderate: bool
    consistent: bool
    all_bounded: bool
    label: str = ""

    def to_json_dict(self):
        s = self.s_hat
        return {
            "s_hat": s if math.isfinite(s) else ("inf" if s > 0 else "-inf"),
            "per_order": [p.to_json_dict() for p in self.per_order],
            "consistency_spread": self.consistency_spread,
            "moderate": self.moderate,
            "consistent": self.consistent,
            "all_bounded": self.all_bounded,
        }


def classify_regularity(table: GrowthTable,
                        fit_window: tuple[int, int] | None = None) -> RegularityReport:
    """Three-branch classification of a growth table.

    Per order: bounded when the fitted log-log slope is below 0.05 in
    magnitude, logarithmic when the log-growth model is flagged, zero when
    the curve is identically negligible, power otherwise with s_k = slope + k.
    s_hat is the minimum s_k over power orders: the largest exponent whose
    growth bounds the whole table satisfies. Consistency checks: bounded
    orders must satisfy k < s_hat + 0.1, logarithmic orders |k - s_hat| <=
    0.25, and the per-order spread must stay within 0.25; violations clear
    the `consistent` flag. `moderate` is the eps^-20 growth proxy over all
    retained scales.
    """
    sg = table.scale_grid
    if fit_window is None:
        fit_window = sg.default_window()
    lo, hi = fit_window
    if hi - lo + 1 < 4:
        raise InsufficientDataError("fit window shorter than 4 scales")
    scales = sg.scales

    finite = np.isfinite(table.norms)
    moderate = bool(np.all(finite))
    if moderate:
        cap = scales[None, :] ** (-MODERATE_EXPONENT)
        moderate = bool(np.all(table.norms <= np.maximum(cap, 1.0)))

    per_order: list[OrderClass] = []
    power_sk: list[float] = []
    log_orders: list[int] = []
    bounded_orders: list[int] = []
    for k in range(table.max_order + 1):
        y = table.norms[k]
        y_w = y[lo:hi + 1]
        if not np.all(np.isfinite(y_w)):
            per_order.append(OrderClass(k, None, "zero", None, None))
            continue
        if np.all(y_w <= ZERO_FLOOR):
            per_order.append(OrderClass(k, None, "zero", None, None))
            continue
        try:
            fit = decay_exponent(scales, y, fit_window)
        except InsufficientDataError:
            per_order.append(OrderClass(k, None, "zero", None, None))
            continue
        if fit.log_flag:
            per_order.append(OrderClass(k, fit.exponent, "logarithmic", None,
                                        fit.residual_rms))
            log_orders.append(k)
        elif abs(fit.exponent) < BOUNDED_SLOPE_TOL:
            per_order.append(OrderClass(k, fit.exponent, "bounded", None,
                                        fit.residual_rms))
            bounded_orders.append(k)
        else:
            s_k = fit.exponent + k
            per_order.append(OrderClass(k, fit.exponent, "power", s_k,
                                        fit.residual_rms))
            power_sk.append(s_k)

    all_bounded = not power_sk and not log_orders
    if power_sk:
        s_hat = float(min(power_sk))
        spread = float(max(power_sk) - min(power_sk))
    elif log_orders:
        # only logarithmic growth: s = smallest such order
        s_hat = float(min(log_orders))
        spread = 0.0
    else:
        s_hat = math.inf
        spread = 0.0

    consistent = moderate and spread <= CONSISTENT_SPREAD_TOL
    if math.isfinite(s_hat):
        for k in bounded_orders:
            if not (k < s_hat + BOUNDED_ORDER_MARGIN):
                consistent = False
        for k in log_orders:
            if abs(k - s_hat) > LOG_ORDER_TOL:
                consistent = False

    return RegularityReport(s_hat, tuple(per_order), spread, moderate,
                            consistent, all_bounded, table.label)


def satisfies_growth_bounds(table: GrowthTable, s: float,
                            fit_window: tuple[int, int] | None = None,
                            tol: float = 0.05) -> bool:
    """Direct check of the three-branch growth bounds for exponent s.

    Per order k (zero-class curves impose nothing): slopes must satisfy
    sigma_k >= -tol when k < s (boundedness) and sigma_k >= s - k - tol
    when k >= s (power decay; the logarithmic branch at integer k = s is
    subsumed by the tolerance). Used by the nesting property: a table
    classified at s_hat must pass this for every s' < s_hat.
    """
    sg = table.scale_grid
    if fit_window is None:
        fit_window = sg.default_window()
    for k in range(table.max_order + 1):
        y = table.norms[k]
        if not np.all(np.isfinite(y[fit_window[0]:fit_window[1] + 1])):
            return False
        try:
            fit = decay_exponent(sg.scales, y, fit_window)
        except InsufficientDataError:
            continue  # negligible curve satisfies any bound
        slope = fit.exponent
        if k < s:
            if slope < -tol:
                return False
        elif slope < s - k - tol:
            return False
    return True


def product_regularity_bound(r: float, s: float) -> tuple[float, bool]:
    """Lower bound for the regularity of a product of nets in classes r and s.

    Returns (p, open_below): p = r + s when both are negative, min(r, s)
    when the larger is positive, and min(r, s) approached strictly from
    below when the larger is exactly zero.
    """
    if r < 0 and s < 0:
        return (r + s, False)
    if max(r, s) > 0:
        return (min(r, s), False)
    return (min(r, s), True)


# --- exports ---

def growth_table_to_csv(table: GrowthTable, path) -> None:
    """CSV, rows = derivative orders, columns = scales."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["order\\eps"] + [repr(float(e)) for e in table.scale_grid.scales])
        for k, row in enumerate(table.norms):
            w.writerow([k] + [repr(float(v)) for v in row])


def report_to_json(report: RegularityReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")
