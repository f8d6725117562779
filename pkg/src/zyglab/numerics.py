"""Shared numerical helpers: Gauss-Legendre panels, finite-difference weights,
log-domain quadrature and a small thread-pool map capped by ZYGLAB_THREADS."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def gl_panels(a: float, b: float, n_panels: int, nodes_per_panel: int = 64):
    """Composite Gauss-Legendre nodes/weights on [a, b]."""
    gn, gw = gauss_legendre(nodes_per_panel)
    edges = np.linspace(a, b, n_panels + 1)
    mids = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    nodes = (mids[:, None] + half[:, None] * gn[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def log_quadrature(f, t_lo: float, t_hi: float, n_points: int = 256):
    """Integrate f(t) dt/t over [t_lo, t_hi] with composite GL in log t.

    f must be vectorized over a 1-D array of t values.
    """
    if not (0 < t_lo < t_hi):
        raise ValueError("need 0 < t_lo < t_hi")
    n_panels = max(1, n_points // 64)
    per = max(2, n_points // n_panels)
    v, w = gl_panels(np.log(t_lo), np.log(t_hi), n_panels, per)
    return np.sum(f(np.exp(v)) * w, axis=-1)


_FD_CACHE: dict[tuple[int, tuple], tuple] = {}


def fd_weights_exact(order: int, offsets) -> tuple:
    """Dimensionless finite-difference weights as exact Fractions.

    Solves the moment conditions sum_j w_j o_j^p = order! * [p == order] for
    p = 0..len(offsets)-1 exactly over the rationals (integer offsets), so
    the weights carry no Vandermonde conditioning noise. The derivative at 0
    of f is then sum_j w_j f(o_j h) / h^order, exact on polynomials of
    degree < len(offsets).
    """
    from fractions import Fraction

    key = (order, tuple(int(o) for o in offsets))
    if key not in _FD_CACHE:
        offs = key[1]
        n = len(offs)
        if n <= order:
            raise ValueError("stencil too short for requested order")
        A = [[Fraction(o) ** p for o in offs] for p in range(n)]
        rhs = [Fraction(0)] * n
        rhs[order] = Fraction(math.factorial(order)) if order else Fraction(1)
        # Gaussian elimination with partial pivoting over Q
        for col in range(n):
            piv = max(range(col, n), key=lambda r: abs(A[r][col]))
            if A[piv][col] == 0:
                raise ValueError("singular stencil")
            A[col], A[piv] = A[piv], A[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            inv = Fraction(1) / A[col][col]
            A[col] = [a * inv for a in A[col]]
            rhs[col] *= inv
            for r in range(n):
                if r != col and A[r][col] != 0:
                    f = A[r][col]
                    A[r] = [a - f * b for a, b in zip(A[r], A[col])]
                    rhs[r] -= f * rhs[col]
        _FD_CACHE[key] = tuple(rhs)
    return _FD_CACHE[key]


def fd_weights(order: int, offsets, h: float) -> np.ndarray:
    """Float finite-difference weights for the `order`-th derivative at 0."""
    w = np.array([float(f) for f in fd_weights_exact(order, offsets)])
    return w / h**order


def parallel_map(fn, items):
    """Order-preserving map, threaded when ZYGLAB_THREADS allows (0 = auto)."""
    items = list(items)
    raw = os.environ.get("ZYGLAB_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        cap = 1
    if cap == 0:
        cap = os.cpu_count() or 1
    if cap <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(cap, len(items))) as ex:
        return list(ex.map(fn, items))
