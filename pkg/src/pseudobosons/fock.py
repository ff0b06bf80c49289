"""Truncated Fock-space operators.

Operators are dense complex ``(D, D)`` arrays whose entry ``[i, j]`` is the
matrix element ``<i|X|j>`` on span{|0>, ..., |D-1>}.  Vectors are complex
arrays of length ``D`` holding coefficients over the oscillator basis.

Unbounded operators are corrupted near the truncation edge, so residuals are
measured only on a leading *trust window* of ``w`` indices.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, ExpOverflowError

UNIT_ROUNDOFF = 2.0 ** -53
_MAX_TAYLOR_DEGREE = 40


def _as_operator(X, name="X"):
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {X.shape}")
    if X.shape[0] < 2:
        raise DimensionError(f"{name} has dimension {X.shape[0]} < 2")
    if not np.all(np.isfinite(X)):
        raise DimensionError(f"{name} has non-finite entries")
    return X


def _same_dim(X, Y):
    if X.shape != Y.shape:
        raise DimensionError(f"dimension mismatch: {X.shape} vs {Y.shape}")


def make_ladder_pair(D: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation operators truncated to ``D`` levels.

    ``a[k-1, k] = sqrt(k)``; ``a_dag`` is the conjugate transpose.
    """
    if int(D) != D or D < 2:
        raise DimensionError(f"truncation dimension must be an integer >= 2, got {D!r}")
    D = int(D)
    a = np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1).astype(complex)
    return a, a.conj().T.copy()


def identity(D: int) -> np.ndarray:
    return np.eye(D, dtype=complex)


def adjoint(X) -> np.ndarray:
    return _as_operator(X).conj().T


def commutator(X, Y) -> np.ndarray:
    """``XY - YX``."""
    X = _as_operator(X, "X")
    Y = _as_operator(Y, "Y")
    _same_dim(X, Y)
    return X @ Y - Y @ X


def _taylor_degree(norm: float, tol: float) -> int:
    # smallest m with remainder bound  norm^(m+1)/(m+1)! / (1 - norm/(m+2)) <= tol
    for m in range(1, _MAX_TAYLOR_DEGREE + 1):
        bound = norm ** (m + 1) / math.factorial(m + 1) / (1.0 - norm / (m + 2))
        if bound <= tol:
            return m
    return _MAX_TAYLOR_DEGREE


def op_exp(X, tol: float = UNIT_ROUNDOFF) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a Taylor core.

    ``X`` is scaled by ``2**-s`` so its 1-norm is at most 1.  The Taylor degree
    is the smallest one whose truncation bound on the scaled matrix is below
    ``tol``; the polynomial is evaluated by Horner's rule and squared ``s``
    times.

    Parameters
    ----------
    X : (D, D) array_like
        Finite square matrix.
    tol : float
        Target for the truncation error of the scaled Taylor polynomial,
        relative to the (unit) size of the scaled exponential.

    Raises
    ------
    ExpOverflowError
        If an intermediate square overflows.  The message names the squaring
        step and the scale ``2**-s`` in use.
    """
    X = _as_operator(X)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    D = X.shape[0]
    X = X.astype(complex, copy=False)
    norm1 = float(np.abs(X).sum(axis=0).max())
    if norm1 == 0.0:
        return identity(D)

    s = max(0, math.ceil(math.log2(norm1))) if norm1 > 1.0 else 0
    Y = X / 2.0 ** s
    m = _taylor_degree(norm1 / 2.0 ** s, tol)

    eye = identity(D)
    R = eye.copy()
    for k in range(m, 0, -1):
        R = eye + (Y @ R) / k

    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, s + 1):
            R = R @ R
            if not np.all(np.isfinite(R)):
                raise ExpOverflowError(
                    f"overflow at squaring step {step} of {s} "
                    f"(scale 2**-{s}, 1-norm of input {norm1:.6g})"
                )
    return R


def window_residual(X, target, w: int) -> float:
    """Max-entry deviation ``|X - target|`` over the leading ``w x w`` block.

    ``target`` may be an operator of the same shape or a scalar ``c``, read
    as ``c * I``.
    """
    X = _as_operator(X)
    D = X.shape[0]
    if int(w) != w or w < 1:
        raise DimensionError(f"window must be a positive integer, got {w!r}")
    if w > D:
        raise DimensionError(f"window {w} exceeds dimension {D}")
    w = int(w)
    if np.ndim(target) == 0:
        diff = X[:w, :w] - target * np.eye(w)
    else:
        target = np.asarray(target)
        _same_dim(X, target)
        diff = X[:w, :w] - target[:w, :w]
    return float(np.abs(diff).max())


def vector_window_norm(v, w: int) -> float:
    return float(np.linalg.norm(np.asarray(v)[:w]))


def basis_vector(D: int, k: int) -> np.ndarray:
    e = np.zeros(D, dtype=complex)
    e[k] = 1.0
    return e


def position_operators(D: int) -> tuple[np.ndarray, np.ndarray]:
    """``x = (a + a†)/√2`` and ``p = (a - a†)/(i√2)`` on ``D`` levels."""
    a, ad = make_ladder_pair(D)
    x = (a + ad) / math.sqrt(2.0)
    p = (a - ad) / (1j * math.sqrt(2.0))
    return x, p
