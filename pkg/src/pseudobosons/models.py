"""Builders for the EQHO, Swanson and generalized squeezing models.

Each builder returns an immutable :class:`ModelBundle` holding the
pseudo-bosonic pair ``(A, B)`` with ``[A, B] = 1``, the Hamiltonian
``H = scale * (BA + shift)``, its self-adjoint partner
``h_ref = scale * (a†a + shift)`` and an intertwiner ``W`` with ``HW = W h_ref``.

==============  =====================================  =====================
model           pair (A, B)                            W
==============  =====================================  =====================
EQHO (β)        a - 1/β,  a† + 1/β                      exp((a + a†)/β)
Swanson (θ)     cosθ a + i sinθ a†,  cosθ a† + i sinθ a exp(iθ/2 (a² - a†²))
generalized     a c - √(β/α) s a†,  a† c + √(α/β) s a  exp(α a² + β a†²)
==============  =====================================  =====================

with ``c = cos√(4αβ)`` and ``s = sin√(4αβ)`` in the last row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionError, ParameterError, UnsupportedRegimeError
from .fock import UNIT_ROUNDOFF, identity, make_ladder_pair, op_exp, position_operators

MIN_DIM = 8


def _finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class EqhoParams:
    beta: float

    def __post_init__(self):
        beta = _finite(self.beta, "beta")
        if beta <= 0:
            raise ParameterError(f"beta must be positive, got {beta}")
        object.__setattr__(self, "beta", beta)

    @property
    def gamma(self) -> float:
        return (2 + self.beta ** 2) / (2 * self.beta ** 2)

    def energy(self, k: int) -> float:
        return self.beta * (k + self.gamma)


@dataclass(frozen=True)
class SwansonParams:
    theta: float

    def __post_init__(self):
        theta = _finite(self.theta, "theta")
        if not abs(theta) < math.pi / 4:
            raise ParameterError(f"theta must lie in (-pi/4, pi/4), got {theta}")
        if theta == 0:
            raise ParameterError("theta = 0 reduces to the ordinary oscillator")
        object.__setattr__(self, "theta", theta)

    @property
    def omega(self) -> float:
        return 1.0 / math.cos(2 * self.theta)


@dataclass(frozen=True)
class GeneralizedParams:
    """Coefficients of ``exp(alpha a² + beta_g a†²)``; requires ``alpha * beta_g > 0``."""

    alpha: float
    beta_g: float

    def __post_init__(self):
        alpha = _finite(self.alpha, "alpha")
        beta_g = _finite(self.beta_g, "beta_g")
        if not alpha * beta_g > 0:
            raise UnsupportedRegimeError(f"need alpha * beta_g > 0, got {alpha} * {beta_g}")
        if not math.sqrt(4 * alpha * beta_g) < math.pi / 2:
            raise UnsupportedRegimeError(
                f"need sqrt(4 alpha beta_g) < pi/2, got {math.sqrt(4 * alpha * beta_g):.6g}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta_g", beta_g)

    @property
    def angle(self) -> float:
        return math.sqrt(4 * self.alpha * self.beta_g)

    @property
    def coefficients(self) -> tuple[float, float, float]:
        """``(cos, √(β/α) sin, √(α/β) sin)`` of the squeezing angle."""
        t = self.angle
        ratio = math.sqrt(self.beta_g / self.alpha)
        return math.cos(t), ratio * math.sin(t), math.sin(t) / ratio


Params = Union[EqhoParams, SwansonParams, GeneralizedParams]


def _frozen(X):
    X = np.array(X, dtype=complex)
    X.setflags(write=False)
    return X


@dataclass(frozen=True, eq=False)
class ModelBundle:
    """All operators of one model at truncation ``D``; arrays are read-only."""

    params: Params
    D: int
    A: np.ndarray
    B: np.ndarray
    H: np.ndarray
    h_ref: np.ndarray
    W: np.ndarray
    W_inv: np.ndarray
    scale: float
    shift: float

    @property
    def kind(self) -> str:
        return {EqhoParams: "eqho", SwansonParams: "swanson",
                GeneralizedParams: "generalized"}[type(self.params)]

    @property
    def window(self) -> int:
        return self.D // 2

    @property
    def label(self) -> str:
        p = self.params
        if isinstance(p, EqhoParams):
            return f"eqho(beta={p.beta!r}, D={self.D})"
        if isinstance(p, SwansonParams):
            return f"swanson(theta={p.theta!r}, D={self.D})"
        return f"generalized(alpha={p.alpha!r}, beta_g={p.beta_g!r}, D={self.D})"

    @property
    def number_operator(self) -> np.ndarray:
        return self.B @ self.A

    def __repr__(self):
        return f"ModelBundle({self.label})"


def _check_dim(D):
    if int(D) != D or D < MIN_DIM:
        raise DimensionError(f"model dimension must be an integer >= {MIN_DIM}, got {D!r}")
    return int(D)


def _assemble(params, D, A, B, gen, scale, shift, tol):
    a, ad = make_ladder_pair(D)
    eye = identity(D)
    H = scale * (B @ A + shift * eye)
    h_ref = scale * (ad @ a + shift * eye)
    return ModelBundle(
        params=params, D=D, A=_frozen(A), B=_frozen(B), H=_frozen(H), h_ref=_frozen(h_ref),
        W=_frozen(op_exp(gen, tol)), W_inv=_frozen(op_exp(-gen, tol)),
        scale=float(scale), shift=float(shift),
    )


def build_eqho(p: EqhoParams, D: int = 128, tol: float = UNIT_ROUNDOFF) -> ModelBundle:
    D = _check_dim(D)
    a, ad = make_ladder_pair(D)
    eye = identity(D)
    A = a - eye / p.beta
    B = ad + eye / p.beta
    return _assemble(p, D, A, B, (a + ad) / p.beta, p.beta, p.gamma, tol)


def build_swanson(p: SwansonParams, D: int = 128, tol: float = UNIT_ROUNDOFF) -> ModelBundle:
    D = _check_dim(D)
    a, ad = make_ladder_pair(D)
    c, s = math.cos(p.theta), math.sin(p.theta)
    A = c * a + 1j * s * ad
    B = c * ad + 1j * s * a
    gen = 0.5j * p.theta * (a @ a - ad @ ad)
    return _assemble(p, D, A, B, gen, p.omega, 0.5, tol)


def build_generalized(p: GeneralizedParams, D: int = 128, tol: float = UNIT_ROUNDOFF) -> ModelBundle:
    """Squeezing pair generated by ``exp(alpha a² + beta_g a†²)``.

    No Hamiltonian is attached: ``scale = 1`` and ``shift = 0``, so ``H`` is
    the number operator ``BA`` and ``h_ref`` is ``a†a``.
    """
    D = _check_dim(D)
    a, ad = make_ladder_pair(D)
    c, s_ab, s_ba = p.coefficients
    A = c * a - s_ab * ad
    B = c * ad + s_ba * a
    gen = p.alpha * (a @ a) + p.beta_g * (ad @ ad)
    return _assemble(p, D, A, B, gen, 1.0, 0.0, tol)


def build_model(params: Params, D: int = 128, tol: float = UNIT_ROUNDOFF) -> ModelBundle:
    if isinstance(params, EqhoParams):
        return build_eqho(params, D, tol)
    if isinstance(params, SwansonParams):
        return build_swanson(params, D, tol)
    if isinstance(params, GeneralizedParams):
        return build_generalized(params, D, tol)
    raise TypeError(f"unsupported parameter object {params!r}")


def reference_spectrum(m: ModelBundle, n_max: int) -> np.ndarray:
    """``[scale * (k + shift)]`` for ``k = 0..n_max``."""
    if int(n_max) != n_max or not 0 <= n_max < m.window:
        raise DimensionError(f"n_max must lie in [0, {m.window}), got {n_max!r}")
    return m.scale * (np.arange(int(n_max) + 1) + m.shift)


def direct_hamiltonian(m: ModelBundle) -> np.ndarray:
    """Hamiltonian assembled from position and momentum matrices.

    EQHO: ``(β/2)(p² + x²) + i√2 p``.
    Swanson: ``(p² + x²)/2 - (i/2) tan(2θ) (p² - x²)``.
    Both agree with ``scale * (BA + shift)`` away from the truncation edge.
    """
    x, p = position_operators(m.D)
    if isinstance(m.params, EqhoParams):
        beta = m.params.beta
        return 0.5 * beta * (p @ p + x @ x) + 1j * math.sqrt(2.0) * p
    if isinstance(m.params, SwansonParams):
        t = math.tan(2 * m.params.theta)
        return 0.5 * (p @ p + x @ x) - 0.5j * t * (p @ p - x @ x)
    raise ValueError("the generalized model carries no Hamiltonian")
