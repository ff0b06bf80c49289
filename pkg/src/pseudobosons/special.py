"""Hermite and Legendre polynomials, double factorials, Gauss-Hermite rules."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

MAX_ORDER = 512
MAX_NODES = 4096


def _check_order(n):
    if int(n) != n or n < 0:
        raise ValueError(f"polynomial order must be a non-negative integer, got {n!r}")
    if n > MAX_ORDER:
        raise OverflowError(f"polynomial order {n} exceeds cap {MAX_ORDER}")
    return int(n)


def hermite(n: int, z):
    """Physicists' Hermite polynomial ``H_n(z)``; ``z`` may be complex or an array.

    Three-term recurrence ``H_{k+1} = 2z H_k - 2k H_{k-1}`` from
    ``H_0 = 1``, ``H_1 = 2z``.
    """
    n = _check_order(n)
    z = np.asarray(z)
    h_prev = np.ones_like(z, dtype=np.result_type(z, float))
    if n == 0:
        return h_prev if h_prev.ndim else h_prev[()]
    h = 2 * z * h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * z * h - 2 * k * h_prev
    return h if np.ndim(h) else h[()]


def legendre(n: int, x):
    """Legendre polynomial ``P_n(x)`` by Bonnet's recurrence.

    Valid for any real ``x``, including ``|x| > 1`` where the values grow
    geometrically.  Complex arguments are accepted as well.
    """
    n = _check_order(n)
    x = np.asarray(x)
    x = x.astype(np.result_type(x, float), copy=False)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else p_prev[()]
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p if p.ndim else p[()]


def double_factorial(n: int) -> float:
    """``n!!`` as a float, with ``(-1)!! = 0!! = 1``."""
    if int(n) != n:
        raise ValueError(f"double factorial needs an integer, got {n!r}")
    n = int(n)
    if n < -1:
        raise ValueError(f"double factorial undefined for n = {n} < -1")
    out = 1.0
    for k in range(n, 1, -2):
        out *= k
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for ``∫ f(x) exp(-x²) dx ≈ Σ w_i f(x_i)``.

    ``scaled_weights`` holds ``w_i exp(x_i²)``, computed in log space, for
    integrands that already carry their own Gaussian factor.  The outermost
    plain ``weights`` of large rules underflow to zero; the scaled ones do not.
    """

    nodes: np.ndarray
    weights: np.ndarray
    scaled_weights: np.ndarray
    weight_kind: str = "exp(-x^2)"

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> complex:
        """Apply the rule to ``f(x_i)`` sampled at the nodes (weight implied)."""
        return np.asarray(values) @ self.weights


def _orthonormal_tail(x, m):
    """Return ``p_m(x)``, ``p_{m-1}(x)`` up to a common factor, and ``log`` of it.

    ``p_k`` are orthonormal with respect to ``exp(-x²)``.  Values are rescaled
    on the fly so the recurrence never overflows; ``p_k(x) = q_k * exp(logscale)``.
    """
    p_prev = np.zeros_like(x)
    p = np.full_like(x, math.pi ** -0.25)
    logscale = np.zeros_like(x)
    for k in range(m):
        p_next = (x * p - math.sqrt(k / 2.0) * p_prev) / math.sqrt((k + 1) / 2.0)
        p_prev, p = p, p_next
        big = np.abs(p) > 1e150
        if np.any(big):
            p[big] *= 1e-150
            p_prev[big] *= 1e-150
            logscale[big] += 150 * math.log(10.0)
    return p, p_prev, logscale


@functools.lru_cache(maxsize=32)
def gauss_hermite(m: int) -> QuadratureRule:
    """Gauss-Hermite nodes and weights for the weight ``exp(-x²)``.

    Golub-Welsch eigenvalues of the symmetric Jacobi matrix, polished by two
    Newton steps on the orthonormal recurrence.  Weights use the Christoffel
    form ``w_i = 1 / (m p_{m-1}(x_i)²)`` evaluated in log space, then the
    pair is symmetrized.  Exact for polynomials of degree ``<= 2m - 1``.
    """
    if int(m) != m or not 2 <= m <= MAX_NODES:
        raise ValueError(f"rule size must be an integer in [2, {MAX_NODES}], got {m!r}")
    m = int(m)
    offdiag = np.sqrt(np.arange(1, m) / 2.0)
    x = eigh_tridiagonal(np.zeros(m), offdiag, eigvals_only=True)
    for _ in range(2):
        pm, pm1, _ = _orthonormal_tail(x, m)
        x = x - pm / (math.sqrt(2.0 * m) * pm1)
    _, pm1, logscale = _orthonormal_tail(x, m)
    logw = -math.log(m) - 2.0 * (np.log(np.abs(pm1)) + logscale)

    x = 0.5 * (x - x[::-1])
    logw = 0.5 * (logw + logw[::-1])
    if m % 2:
        x[m // 2] = 0.0
    nodes = x
    weights = np.exp(logw)
    scaled = np.exp(logw + nodes ** 2)
    for arr in (nodes, weights, scaled):
        arr.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, scaled_weights=scaled)
