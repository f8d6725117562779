"""Deterministic corpus of test signals and nets with known regularity.

Every generator is reproducible bit-for-bit: phases are fixed, cutoffs are
smooth plateau bumps (width L/4 by default) so nonperiodic shapes become
honestly periodic, and regularity is read on an interior window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .colombeau import Net, formula_net
from .grid import Grid, SampledSignal, make_grid
from .kernels import smooth_step


def plateau(y: np.ndarray, flat: float, support: float) -> np.ndarray:
    """Smooth even cutoff: 1 for |y| <= flat, 0 for |y| >= support."""
    a = np.abs(np.asarray(y, dtype=float))
    out = np.where(a <= flat, 1.0, 0.0)
    m = (a > flat) & (a < support)
    if np.any(m):
        tau = (2 * a[m] - (support + flat)) / (support - flat)
        out[m] = smooth_step(-tau)
    return out


def weierstrass(a: float, b: int, n_terms: int, grid: Grid,
                normalize: bool = False) -> SampledSignal:
    """sum_k a^k cos(b^k * 2 pi x / L), k < n_terms, phases fixed to 0.

    Expected Zygmund exponent: s = ln(1/a)/ln(b).
    """
    if not (0 < a < 1):
        raise ValueError("need 0 < a < 1")
    if not (isinstance(b, (int, np.integer)) and b >= 2):
        raise ValueError("b must be an integer >= 2")
    base = 2 * np.pi / grid.length
    if b ** (n_terms - 1) * base > grid.nyquist:
        raise ValueError(
            f"aliasing: top frequency {b**(n_terms - 1) * base:.3g} beyond "
            f"Nyquist {grid.nyquist:.3g}")
    x = grid.x
    vals = np.zeros_like(x)
    for k in range(n_terms):
        vals += a**k * np.cos(b**k * base * x)
    if normalize:
        vals /= (1 - a**n_terms) / (1 - a)
    return SampledSignal(grid, vals.astype(complex), True)


def weierstrass_exponent(a: float, b: int) -> float:
    return math.log(1 / a) / math.log(b)


def cusp(s: float, grid: Grid, center: float = 0.0,
         cutoff_width: float | None = None) -> SampledSignal:
    """|x - center|^s times a smooth plateau cutoff, periodized."""
    if not (0 < s < 1):
        raise ValueError("cusp exponent must lie in (0, 1)")
    if cutoff_width is None:
        cutoff_width = grid.length / 4
    y = grid.x - center
    vals = np.abs(y) ** s * plateau(y, cutoff_width / 2, cutoff_width)
    return SampledSignal(grid, vals.astype(complex), True)


def heaviside(grid: Grid, center: float = 0.0,
              cutoff_width: float | None = None) -> SampledSignal:
    """Unit step at `center` under a smooth plateau cutoff."""
    if cutoff_width is None:
        cutoff_width = grid.length / 4
    y = grid.x - center
    vals = np.where(y >= 0, 1.0, 0.0) * plateau(y, cutoff_width / 2, cutoff_width)
    return SampledSignal(grid, vals.astype(complex), True)


def delta_comb(grid: Grid) -> SampledSignal:
    """Discrete delta at x = 0: one sample of height 1/spacing."""
    vals = np.zeros(grid.n_points)
    vals[grid.n_points // 2] = 1.0 / grid.spacing  # x = 0 sits at index N/2
    return SampledSignal(grid, vals.astype(complex), True)


def dyadic_sum(s: float, grid: Grid, n_terms: int = 11,
               phases: np.ndarray | None = None) -> SampledSignal:
    """sum_j 2^{-j s} cos(2^j * 2 pi x / L + theta_j), j = 0..n_terms-1."""
    base = 2 * np.pi / grid.length
    if 2 ** (n_terms - 1) * base > grid.nyquist:
        raise ValueError("aliasing: dyadic sum exceeds Nyquist")
    if phases is None:
        phases = np.zeros(n_terms)
    x = grid.x
    vals = np.zeros_like(x)
    for j in range(n_terms):
        vals += 2.0 ** (-j * s) * np.cos(2**j * base * x + phases[j])
    return SampledSignal(grid, vals.astype(complex), True)


def tone(grid: Grid, xi0: float) -> SampledSignal:
    """cos(xi0 x); xi0 must be one of the grid frequencies."""
    base = 2 * np.pi / grid.length
    if abs(xi0 / base - round(xi0 / base)) > 1e-9:
        raise ValueError(f"xi0 = {xi0} is not a grid frequency (multiple of {base})")
    return SampledSignal(grid, np.cos(xi0 * grid.x).astype(complex), True)


def complex_tone(grid: Grid, xi0: float) -> SampledSignal:
    base = 2 * np.pi / grid.length
    if abs(xi0 / base - round(xi0 / base)) > 1e-9:
        raise ValueError(f"xi0 = {xi0} is not a grid frequency (multiple of {base})")
    return SampledSignal(grid, np.exp(1j * xi0 * grid.x), False)


@dataclass(frozen=True)
class SignalRecipe:
    kind: str
    params: dict[str, Any]
    expected_regularity: float
    provenance: str  # "derived" | "paper"
    notes: str = ""


@dataclass(frozen=True)
class CorpusRow:
    name: str
    recipe: SignalRecipe
    payload: Any  # SampledSignal or Net
    expected: float
    provenance: str


CORPUS_N_POINTS = 2**14
CORPUS_LENGTH = 2 * np.pi


def corpus_grid() -> Grid:
    return make_grid(CORPUS_N_POINTS, CORPUS_LENGTH)


def _sin_derivs(y: np.ndarray, k: int) -> np.ndarray:
    return np.sin(y + k * np.pi / 2)


def corpus(grid: Grid | None = None) -> list[CorpusRow]:
    """The fixed experiment matrix with provenance-tagged expectations."""
    if grid is None:
        grid = corpus_grid()
    rows: list[CorpusRow] = []

    def add(name, kind, params, expected, provenance, payload, notes=""):
        rows.append(CorpusRow(name, SignalRecipe(kind, params, expected,
                                                 provenance, notes),
                              payload, expected, provenance))

    add("delta_comb", "delta_comb", {}, -1.0, "derived", delta_comb(grid),
        "scaling oracle: delta * rho_e = rho_e")
    add("heaviside", "heaviside", {}, 0.0, "derived", heaviside(grid),
        "derivative is a delta at -1; primitive gain oracle")
    add("cusp_0.3", "cusp", {"s": 0.3}, 0.3, "derived", cusp(0.3, grid),
        "Holder-quotient scan oracle")
    add("weierstrass_0.5", "weierstrass", {"a": 0.5, "b": 4, "n_terms": 7},
        0.5, "derived", weierstrass(0.5, 4, 7, grid),
        "dyadic coefficients give exact block decay")
    add("weierstrass_1.5", "weierstrass", {"a": 4.0**-1.5, "b": 4, "n_terms": 7},
        1.5, "derived", weierstrass(4.0**-1.5, 4, 7, grid),
        "dyadic coefficients give exact block decay")
    add("eps_pow_sine_0.5", "eps_pow_sine", {"s": 0.5}, 0.5, "paper",
        formula_net("eps_pow_sine", grid, s=0.5))
    add("sin_x_over_eps", "scaled_smooth", {"name": "sin", "r": 1.0}, 0.0,
        "paper", formula_net("scaled_smooth", grid, f_derivs=_sin_derivs,
                             r=1.0, name="sin"))
    add("lorentz", "lorentz", {}, 0.5, "paper", formula_net("lorentz", grid))
    add("scaled_poly_x2", "scaled_poly", {"coeffs": [0.0, 0.0, 1.0], "r": 0.5},
        -1.0, "paper", formula_net("scaled_poly", grid, coeffs=[0.0, 0.0, 1.0],
                                   r=0.5))
    return rows


def corpus_to_dir(out_dir) -> dict:
    """Materialize the corpus: CSV per sampled signal plus a manifest.

    Net rows have no CSV (they are eps-families); the manifest records
    their recipes. Idempotent: repeated runs produce identical bytes.
    """
    import json
    import os

    from .grid import signal_to_csv

    os.makedirs(out_dir, exist_ok=True)
    manifest = {"grid": {"n_points": CORPUS_N_POINTS, "length": CORPUS_LENGTH},
                "rows": []}
    for row in corpus():
        entry = {
            "name": row.name,
            "kind": row.recipe.kind,
            "params": row.recipe.params,
            "expected_regularity": row.expected,
            "provenance": row.provenance,
            "notes": row.recipe.notes,
            "csv": None,
        }
        if isinstance(row.payload, SampledSignal):
            fname = f"{row.name}.csv"
            signal_to_csv(row.payload, os.path.join(out_dir, fname))
            entry["csv"] = fname
        manifest["rows"].append(entry)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
