"""Position-space wavefunctions and Gauss-Hermite inner products.

Closed forms (``x`` real, ``a = (x + d/dx)/√2``)::

    oscillator      e_k(x)      = π^{-1/4} (2^k k!)^{-1/2} H_k(x) exp(-x²/2)
    EQHO  phi       φ_n(x)      = π^{-1/4} (2^n n!)^{-1/2} H_n(x) exp(-(x - s)²/2),  s = √2/β
    EQHO  psi       Ψ_n(x)      = same with s -> -s
    Swanson phi     φ_n(x)      = N1 (2^n n!)^{-1/2} H_n(e^{iθ}x)  exp(-e^{2iθ}x²/2)
    Swanson psi     Ψ_n(x)      = N2 (2^n n!)^{-1/2} H_n(e^{-iθ}x) exp(-e^{-2iθ}x²/2)

with ``N1 = π^{-1/4}`` and ``N2 = e^{-iθ} π^{-1/4}`` so that ``<φ_0, Ψ_0> = 1``.

For the EQHO the n-fold power of ``(x - d/dx + s)`` acting on the displaced
Gaussian ``exp(-(x - s)²/2)`` maps a polynomial prefactor ``P`` to
``2xP - P'``, which is the Hermite generating step; hence the plain ``H_n(x)``.
"""

from __future__ import annotations

import cmath
import functools
import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import BranchWarning, ParameterError, QuadratureError
from .special import MAX_NODES, gauss_hermite, hermite, legendre

MAX_WAVEFUNCTION_ORDER = 60
QUAD_RTOL = 1e-10
QUAD_START = 64
# rounding floor for cancelling integrands, in units of ∫|integrand|
_NOISE_FLOOR = 100 * 2.0 ** -52
_BRANCH_GAP = 1e-8

_PI_QUARTER = math.pi ** -0.25


def quad_cap() -> int:
    """Largest rule size tried, from ``PBX_QUAD_MAX`` (default 4096)."""
    raw = os.environ.get("PBX_QUAD_MAX", "")
    cap = int(raw) if raw.strip() else MAX_NODES
    return max(2, min(cap, MAX_NODES))


def swanson_normalization(theta: float, side: str) -> complex:
    if side == "phi":
        return complex(_PI_QUARTER)
    if side == "psi":
        return cmath.exp(-1j * theta) * _PI_QUARTER
    raise ValueError(f"side must be 'phi' or 'psi', got {side!r}")


@dataclass(frozen=True)
class Wavefunction:
    """One member of a position-space family.

    ``model`` is ``"ho"`` (oscillator eigenfunction, ``param`` ignored),
    ``"eqho"`` (``param`` = β) or ``"swanson"`` (``param`` = θ).
    """

    model: str
    side: str
    n: int
    param: float = 0.0

    def __post_init__(self):
        if self.model not in ("ho", "eqho", "swanson"):
            raise ValueError(f"unknown model tag {self.model!r}")
        if self.side not in ("phi", "psi"):
            raise ValueError(f"side must be 'phi' or 'psi', got {self.side!r}")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"index must be a non-negative integer, got {self.n!r}")
        if self.n > MAX_WAVEFUNCTION_ORDER:
            raise OverflowError(f"index {self.n} exceeds cap {MAX_WAVEFUNCTION_ORDER}")
        if self.model == "eqho" and not self.param > 0:
            raise ParameterError(f"beta must be positive, got {self.param}")
        if self.model == "swanson" and not abs(self.param) < math.pi / 4:
            raise ParameterError(f"theta must lie in (-pi/4, pi/4), got {self.param}")

    @property
    def decay(self) -> float:
        """Rate ``ρ`` of the Gaussian envelope ``|ψ(x)| ~ exp(-ρ x²)``."""
        if self.model == "swanson":
            return 0.5 * math.cos(2 * self.param)
        return 0.5

    def __call__(self, x):
        return eval_wavefunction(self, x)


def ho_functions(kmax: int, x) -> np.ndarray:
    """Oscillator eigenfunctions ``e_0..e_{kmax-1}`` at real ``x``, shape ``(kmax, len(x))``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((kmax, x.size))
    out[0] = _PI_QUARTER * np.exp(-0.5 * x * x)
    if kmax > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, kmax - 1):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def eval_wavefunction(wf: Wavefunction, x):
    x = np.asarray(x, dtype=float)
    n = wf.n
    if wf.model == "ho":
        vals = ho_functions(n + 1, x.ravel())[n].reshape(x.shape)
        return vals.astype(complex)
    norm = 1.0 / math.sqrt(2.0 ** n * math.factorial(n))
    if wf.model == "eqho":
        shift = math.sqrt(2.0) / wf.param * (1 if wf.side == "phi" else -1)
        return (_PI_QUARTER * norm * hermite(n, x) * np.exp(-0.5 * (x - shift) ** 2)).astype(complex)
    sign = 1 if wf.side == "phi" else -1
    rot = cmath.exp(sign * 1j * wf.param)
    pref = swanson_normalization(wf.param, wf.side) * norm
    return pref * hermite(n, rot * x) * np.exp(-0.5 * rot ** 2 * x * x)


def swanson_vacuum_derivative(theta: float, side: str, x):
    """Closed-form ``d/dx`` of the Swanson vacuum wavefunction."""
    x = np.asarray(x, dtype=float)
    rot2 = cmath.exp((2j if side == "phi" else -2j) * theta)
    return -rot2 * x * eval_wavefunction(Wavefunction("swanson", side, 0, theta), x)


def vacuum_ode_residual(theta: float, x) -> tuple[float, float]:
    """Pointwise residuals of the first-order equations defining the two vacua.

    ``(e^{iθ}x + e^{-iθ}d/dx) φ_0 = 0`` and ``(e^{-iθ}x + e^{iθ}d/dx) Ψ_0 = 0``.
    """
    x = np.asarray(x, dtype=float)
    u = cmath.exp(1j * theta)
    phi = eval_wavefunction(Wavefunction("swanson", "phi", 0, theta), x)
    psi = eval_wavefunction(Wavefunction("swanson", "psi", 0, theta), x)
    r_phi = u * x * phi + swanson_vacuum_derivative(theta, "phi", x) / u
    r_psi = x * psi / u + u * swanson_vacuum_derivative(theta, "psi", x)
    return float(np.abs(r_phi).max()), float(np.abs(r_psi).max())


def _rule_integral(fn, rho, m):
    rule = gauss_hermite(m)
    root = math.sqrt(rho)
    return (np.asarray(fn(rule.nodes / root)) @ rule.scaled_weights) / root


def adaptive_integral(fn: Callable, rho: float, m0: int = QUAD_START, rtol: float = QUAD_RTOL):
    """``∫ fn(x) dx`` over the real line for integrands decaying like ``exp(-ρx²)``.

    ``fn`` maps node arrays to values of shape ``(..., len(x))``; vector-valued
    integrands are handled componentwise.  Nodes of the ``exp(-y²)`` rule are
    rescaled by ``1/√ρ``.  The rule size doubles until successive results agree
    to ``rtol`` relative to the result, plus a rounding allowance of about
    ``2e-14`` times the integral of ``|fn|`` so that cancelling or vanishing
    integrals terminate.

    Returns
    -------
    value, m : result and the rule size that produced it.
    """
    if not rho > 0:
        raise ValueError(f"decay rate must be positive, got {rho}")
    cap = quad_cap()

    def both(x):
        v = np.asarray(fn(x))
        return np.stack([v, np.abs(v)])

    m = min(m0, cap)
    prev = _rule_integral(both, rho, m)
    while 2 * m <= cap:
        m *= 2
        cur = _rule_integral(both, rho, m)
        value, magnitude = cur[0], cur[1].real
        allowed = rtol * float(np.max(np.abs(value))) + _NOISE_FLOOR * float(np.max(magnitude))
        if float(np.max(np.abs(value - prev[0]))) <= allowed:
            return value, m
        prev = cur
    raise QuadratureError(f"quadrature not converged at rule size {m} (cap {cap})")


def _decay_of(f, decay):
    if decay is not None:
        return decay
    if isinstance(f, Wavefunction):
        return f.decay
    raise ValueError("callables need an explicit decay rate")


def quad_inner(f, g, m: int = QUAD_START, conjugate_first: bool = True,
               decay: float | None = None, f_decay: float | None = None,
               g_decay: float | None = None) -> complex:
    """``∫ conj(f) g dx`` (or ``∫ f g dx``) by adaptive Gauss-Hermite quadrature.

    ``f`` and ``g`` are :class:`Wavefunction` objects or callables.  The
    integrand's Gaussian rate is ``decay`` if given, otherwise the sum of the
    two factors' rates (callables must then supply ``f_decay``/``g_decay``).
    """
    if decay is None:
        decay = _decay_of(f, f_decay) + _decay_of(g, g_decay)

    def integrand(x):
        fx = f(x)
        return (np.conj(fx) if conjugate_first else fx) * g(x)

    value, _ = adaptive_integral(integrand, decay, m0=m)
    return complex(value)


def fock_coefficients(wf, kmax: int, decay: float | None = None) -> np.ndarray:
    """Projections ``<e_k, wf>`` for ``k < kmax`` by quadrature."""
    rho = 0.5 + _decay_of(wf, decay)
    value, _ = adaptive_integral(lambda x: ho_functions(kmax, x) * wf(x), rho)
    return np.asarray(value, dtype=complex)


def fock_to_position(coeffs) -> Callable:
    """Callable evaluating ``Σ_k c_k e_k(x)``; its envelope decays like ``exp(-x²/2)``."""
    coeffs = np.asarray(coeffs, dtype=complex)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return coeffs @ ho_functions(coeffs.size, x.ravel())

    return evaluate


@functools.lru_cache(maxsize=64)
def vacuum_fock_constant(theta: float, side: str) -> complex:
    """Ground-state coefficient ``<e_0, vacuum>`` of a Swanson vacuum, by quadrature."""
    wf = Wavefunction("swanson", side, 0, theta)
    return complex(fock_coefficients(wf, 1)[0])


class IdentityCheck(NamedTuple):
    value: complex
    reference: complex
    deviation: float


def _near_cut(z: complex) -> bool:
    return z != 0 and abs(abs(cmath.phase(z)) - math.pi) < _BRANCH_GAP


def prudnikov_rhs(n: int, p: complex, b: complex, c: complex) -> complex:
    """Closed form of ``∫_0^∞ exp(-px²) H_n(bx) H_n(cx) dx`` (principal branches)."""
    q = b * b + c * c - p
    if q == 0:
        raise ValueError("b² + c² - p vanishes; closed form is singular")
    if any(_near_cut(z) for z in (p, q, p * q)):
        warnings.warn(f"radicand on the branch cut for p={p}, b={b}, c={c}", BranchWarning)
    arg = b * c / cmath.sqrt(p * q)
    return (2.0 ** (n - 1) * math.factorial(n) * math.sqrt(math.pi)
            * cmath.exp(-0.5 * (n + 1) * cmath.log(p))
            * cmath.exp(0.5 * n * cmath.log(q))
            * complex(legendre(n, arg)))


def verify_prudnikov(n: int, p: complex, b: complex, c: complex) -> IdentityCheck:
    """Half-line Gaussian-Hermite integral: quadrature vs the Legendre closed form.

    The integrand ``exp(-px²) H_n(bx) H_n(cx)`` is even, so the half-line
    value is half the full-line quadrature.
    """
    p, b, c = complex(p), complex(b), complex(c)
    if not p.real > 0:
        raise ValueError(f"need Re p > 0, got p = {p}")

    def integrand(x):
        return np.exp(-p * x * x) * hermite(n, b * x) * hermite(n, c * x)

    value, _ = adaptive_integral(integrand, p.real)
    lhs = 0.5 * complex(value)
    rhs = prudnikov_rhs(n, p, b, c)
    dev = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs)
    return IdentityCheck(lhs, rhs, dev)


def norm_closed_form(theta: float, n: int) -> float:
    """``‖φ_n‖² = |N1|² √(π / cos 2θ) P_n(1 / cos 2θ)`` for the Swanson family."""
    c2 = math.cos(2 * theta)
    return abs(swanson_normalization(theta, "phi")) ** 2 * math.sqrt(math.pi / c2) * legendre(n, 1 / c2)


def norm_alternate_form(theta: float, n: int) -> float:
    """Candidate with prefactor ``cos(π / cos 2θ)`` in place of ``√(π / cos 2θ)``."""
    c2 = math.cos(2 * theta)
    return abs(swanson_normalization(theta, "phi")) ** 2 * math.cos(math.pi / c2) * legendre(n, 1 / c2)


def verify_norm_formula(theta: float, n: int) -> IdentityCheck:
    """Quadrature ``‖φ_n‖²`` against :func:`norm_closed_form`."""
    if not 0 < abs(theta) < math.pi / 4:
        raise ParameterError(f"theta must lie in (-pi/4, pi/4) minus 0, got {theta}")
    if n > 40:
        raise ValueError(f"index {n} exceeds 40")
    wf = Wavefunction("swanson", "phi", n, theta)
    quad = quad_inner(wf, wf).real
    ref = norm_closed_form(theta, n)
    return IdentityCheck(quad, ref, abs(quad - ref) / abs(ref))


def biorthogonality_scale(n: int, m: int) -> float:
    return math.sqrt(2.0 ** (n + m) * math.pi * math.factorial(n) * math.factorial(m))


def verify_biorthogonality_integral(n: int, m: int, theta: float) -> IdentityCheck:
    """``∫ H_n(e^{-iθ}x) H_m(e^{-iθ}x) exp(-e^{-2iθ}x²) dx`` by quadrature.

    ``reference`` is the phase-free value ``δ_nm √(2^{n+m} π n! m!)``.  The
    deviation is measured against ``e^{iθ}`` times it, the value obtained by
    rotating the contour ``x -> e^{iθ}y``; it is normalized by
    ``√(2^{n+m} π n! m!)`` so off-diagonal entries are on the same scale.
    """
    if not abs(theta) < math.pi / 4:
        raise ParameterError(f"theta must lie in (-pi/4, pi/4), got {theta}")
    if n > 40 or m > 40:
        raise ValueError("indices must not exceed 40")
    rot = cmath.exp(-1j * theta)

    def integrand(x):
        return hermite(n, rot * x) * hermite(m, rot * x) * np.exp(-rot * rot * x * x)

    value, _ = adaptive_integral(integrand, math.cos(2 * theta))
    value = complex(value)
    scale = biorthogonality_scale(n, m)
    reference = scale if n == m else 0.0
    corrected = cmath.exp(1j * theta) * reference
    return IdentityCheck(value, complex(reference), abs(value - corrected) / scale)
