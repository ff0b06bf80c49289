"""Biorthogonal families ``φ_n``, ``Ψ_n`` built by three independent routes.

* ``ladder``: solve ``A φ_0 = 0`` and ``B† Ψ_0 = 0`` numerically, then raise
  with ``φ_{n+1} = B φ_n / √(n+1)`` and ``Ψ_{n+1} = A† Ψ_n / √(n+1)``.
* ``closed_form``: the same raising applied to vacua written as explicit
  coherent or squeezed series.
* ``intertwiner``: ``φ_n = κ W e_n`` and ``Ψ_n = κ' (W⁻¹)† e_n``.

Normalization: EQHO vacua have unit norm, so ``<Ψ_0, φ_0> = exp(-2/β²)``.
Swanson vacua carry the ground-state coefficients of the position-space
vacua, so ``<Ψ_0, φ_0> = 1``.  Generalized vacua have unit norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import gammaln

from .errors import DimensionError, IllConditionedError, NoVacuumError
from .models import EqhoParams, GeneralizedParams, ModelBundle, SwansonParams
from .position import vacuum_fock_constant

VACUUM_TOL = 1e-6
# vectors with this much norm in the top quarter are edge artifacts
EDGE_TOL = 1e-3
COND_LIMIT = 1e12
ROUTES = ("ladder", "closed_form", "intertwiner", "onb")
SIDES = ("phi", "psi")


@dataclass(frozen=True, eq=False)
class BasisFamily:
    """Vectors ``0..n_max`` of one side of a biorthogonal pair, stored as columns."""

    vectors: np.ndarray
    route: str
    side: str
    model_id: str
    window: int

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if self.side not in SIDES:
            raise ValueError(f"side must be 'phi' or 'psi', got {self.side!r}")
        vecs = np.array(self.vectors, dtype=complex)
        if vecs.ndim != 2:
            raise DimensionError("vectors must be a (D, n_max + 1) array")
        if not np.all(np.isfinite(vecs)):
            raise DimensionError("family contains non-finite entries")
        if np.any(np.linalg.norm(vecs, axis=0) == 0):
            raise ValueError("family contains a zero vector")
        if vecs.shape[1] - 1 >= self.window:
            raise DimensionError(f"n_max {vecs.shape[1] - 1} must be below window {self.window}")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def n_max(self) -> int:
        return self.vectors.shape[1] - 1

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.vectors.shape[1]

    def __getitem__(self, n):
        return self.vectors[:, n]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=0)


@dataclass(frozen=True, eq=False)
class RouteAgreement:
    """Per-index relative deviations ``‖f_n - g_n‖ / ‖f_n‖`` between two routes.

    For the intertwiner route ``alpha_est`` is the constant relating the
    ladder vacuum to ``W e_0``, ``alpha_per_n`` the same ratio taken for each
    ``n`` separately, and ``alpha_psi`` the ``Ψ``-side constant.
    """

    per_n: np.ndarray
    alpha_est: complex | None = None
    alpha_per_n: np.ndarray | None = None
    alpha_psi: complex | None = None
    max_dev: float = field(init=False)

    def __post_init__(self):
        per_n = np.asarray(self.per_n, dtype=float)
        object.__setattr__(self, "per_n", per_n)
        object.__setattr__(self, "max_dev", float(per_n.max()) if per_n.size else 0.0)


def _check_nmax(m: ModelBundle, n_max: int, limit: int):
    if int(n_max) != n_max or not 0 <= n_max < limit:
        raise DimensionError(f"n_max must lie in [0, {limit}), got {n_max!r}")
    return int(n_max)


def solve_vacuum(M) -> tuple[np.ndarray, float]:
    """Unit vector ``v`` with ``M v ≈ 0`` and the residual ``‖M v‖``.

    For operators whose ladder structure makes ``M[:-1, 1:]`` lower
    triangular with nonzero diagonal (every model here), ``v_0 = 1`` is fixed
    and the remaining entries follow by forward substitution on rows
    ``0..D-2``; the last row, which only sees the truncation edge, is dropped.
    Other operators fall back to the smallest right singular vector.  The
    residual bounds the smallest singular value of ``M`` from above.  A
    vector with norm above ``1e-3`` in the top quarter of the space lives on
    the truncation edge and is rejected as well.
    """
    M = np.asarray(M, dtype=complex)
    sub = M[:-1, 1:]
    diag = np.diag(sub)
    if not np.any(np.triu(sub, 1)) and np.all(diag != 0):
        v = np.empty(M.shape[0], dtype=complex)
        v[0] = 1.0
        with np.errstate(over="ignore", invalid="ignore"):
            v[1:] = solve_triangular(sub, -M[:-1, 0], lower=True)
    else:
        v = np.linalg.svd(M)[2][-1].conj()
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0:
        raise NoVacuumError("vacuum coefficients diverge; no normalizable vacuum")
    v = v / norm
    residual = float(np.linalg.norm(M @ v))
    tail = float(np.linalg.norm(v[(3 * M.shape[0]) // 4:]))
    if tail > EDGE_TOL:
        raise NoVacuumError(f"vacuum sits on the truncation edge (tail norm {tail:.3g})")
    if residual > VACUUM_TOL:
        raise NoVacuumError(f"no vacuum: smallest singular value bound {residual:.3g} > {VACUUM_TOL}")
    return v, residual


def _gauge(m: ModelBundle, v: np.ndarray, side: str) -> np.ndarray:
    """Fix phase and scale of a unit vacuum vector by its ground-state coefficient."""
    if isinstance(m.params, SwansonParams):
        return v * (vacuum_fock_constant(m.params.theta, side) / v[0])
    return v * (abs(v[0]) / v[0])


def _raise(vac, R, n_max):
    out = np.empty((vac.size, n_max + 1), dtype=complex)
    out[:, 0] = vac
    for n in range(n_max):
        out[:, n + 1] = R @ out[:, n] / math.sqrt(n + 1)
    return out


def _families(m, vac_phi, vac_psi, n_max, route):
    phis = BasisFamily(_raise(vac_phi, m.B, n_max), route, "phi", m.label, m.window)
    psis = BasisFamily(_raise(vac_psi, m.A.conj().T, n_max), route, "psi", m.label, m.window)
    return phis, psis


def ladder_vacua(m: ModelBundle) -> tuple[np.ndarray, np.ndarray]:
    phi0, _ = solve_vacuum(m.A)
    psi0, _ = solve_vacuum(m.B.conj().T)
    return _gauge(m, phi0, "phi"), _gauge(m, psi0, "psi")


def ladder_family(m: ModelBundle, n_max: int) -> tuple[BasisFamily, BasisFamily]:
    n_max = _check_nmax(m, n_max, m.window)
    return _families(m, *ladder_vacua(m), n_max, "ladder")


def eqho_vacuum_closed_form(beta: float, D: int, side: str = "phi") -> np.ndarray:
    """Coherent state ``exp(-1/(2β²)) Σ (±1/β)^k / √k! e_k``; ``+`` for ``φ_0``."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    k = np.arange(D)
    mag = np.exp(-0.5 / beta ** 2 - k * math.log(beta) - 0.5 * gammaln(k + 1))
    sign = 1.0 if side == "phi" else -1.0
    return (mag * sign ** k).astype(complex)


def squeezed_series(t: complex, D: int) -> np.ndarray:
    """Even series ``x_{2n} = t^n √((2n-1)!!/(2n)!!)`` with ``x_0 = 1``."""
    v = np.zeros(D, dtype=complex)
    v[0] = 1.0
    for n in range(1, (D + 1) // 2):
        v[2 * n] = v[2 * n - 2] * t * math.sqrt((2 * n - 1) / (2 * n))
    return v


def swanson_vacuum_closed_form(theta: float, D: int, side: str = "phi") -> np.ndarray:
    """Swanson vacuum series with ``t = ∓ i tanθ`` and the quadrature ground coefficient."""
    t = (-1j if side == "phi" else 1j) * math.tan(theta)
    return vacuum_fock_constant(theta, side) * squeezed_series(t, D)


def generalized_vacuum_closed_form(p: GeneralizedParams, D: int, side: str = "phi") -> np.ndarray:
    """Unit-norm squeezed vacuum of the generalized pair (truncated)."""
    c, s_ab, s_ba = p.coefficients
    t = s_ab / c if side == "phi" else -s_ba / c
    v = squeezed_series(t, D)
    return v / np.linalg.norm(v)


def closed_form_family(m: ModelBundle, n_max: int) -> tuple[BasisFamily, BasisFamily]:
    n_max = _check_nmax(m, n_max, m.window)
    p = m.params
    if isinstance(p, EqhoParams):
        vac = [eqho_vacuum_closed_form(p.beta, m.D, s) for s in SIDES]
    elif isinstance(p, SwansonParams):
        vac = [swanson_vacuum_closed_form(p.theta, m.D, s) for s in SIDES]
    else:
        vac = [generalized_vacuum_closed_form(p, m.D, s) for s in SIDES]
    return _families(m, vac[0], vac[1], n_max, "closed_form")


def route_agreement(f: BasisFamily, g: BasisFamily, w: int | None = None) -> RouteAgreement:
    """Compare two families of the same side, model and size.

    With ``w`` given, both the difference and the reference norm are taken
    over the leading ``w`` coefficients only.
    """
    if f.side != g.side or f.model_id != g.model_id or f.n_max != g.n_max or f.dim != g.dim:
        raise ValueError(
            f"families differ: ({f.side}, {f.model_id}, {f.n_max}) vs ({g.side}, {g.model_id}, {g.n_max})"
        )
    fv, gv = f.vectors, g.vectors
    if w is not None:
        fv, gv = fv[:w], gv[:w]
    per_n = np.linalg.norm(fv - gv, axis=0) / np.linalg.norm(fv, axis=0)
    return RouteAgreement(per_n)


def intertwiner_family(m: ModelBundle, n_max: int, reference=None):
    """Families ``κ W e_n`` and ``κ' (W⁻¹)† e_n`` matched to the ladder route.

    ``κ`` (and ``κ'``) is the ratio of the ladder vacuum to ``W e_0`` (resp.
    ``(W⁻¹)† e_0``) at its largest entry.  Deviations are measured against
    the ladder families (or ``reference``, a ``(phis, psis)`` pair).

    Returns
    -------
    phis, psis, agreement
    """
    n_max = _check_nmax(m, n_max, m.window // 2)
    w = m.window
    cols_phi = np.asarray(m.W[:, : n_max + 1])
    cols_psi = np.asarray(m.W_inv.conj().T[:, : n_max + 1])
    for name, cols in (("W", cols_phi), ("(W^-1)^dagger", cols_psi)):
        cond = np.linalg.cond(cols[:w])
        if not cond <= COND_LIMIT:
            raise IllConditionedError(f"{name} restricted to the window has condition {cond:.3g}")
    ref_phi, ref_psi = reference if reference is not None else ladder_family(m, n_max)

    def ratios(ref, cols):
        j = np.argmax(np.abs(ref.vectors), axis=0)
        n = np.arange(ref.vectors.shape[1])
        return ref.vectors[j, n] / cols[j, n]

    alpha_n = ratios(ref_phi, cols_phi)
    kappa, kappa_psi = complex(alpha_n[0]), complex(ratios(ref_psi, cols_psi)[0])
    phis = BasisFamily(kappa * cols_phi, "intertwiner", "phi", m.label, m.window)
    psis = BasisFamily(kappa_psi * cols_psi, "intertwiner", "psi", m.label, m.window)
    dev = np.maximum(
        np.linalg.norm(phis.vectors - ref_phi.vectors, axis=0) / ref_phi.norms(),
        np.linalg.norm(psis.vectors - ref_psi.vectors, axis=0) / ref_psi.norms(),
    )
    return phis, psis, RouteAgreement(dev, kappa, alpha_n, kappa_psi)


def onb_family(D: int, n_max: int, model_id: str = "onb") -> tuple[BasisFamily, BasisFamily]:
    """The orthonormal basis ``e_0..e_{n_max}`` on both sides (self-dual control)."""
    vecs = np.eye(D, n_max + 1, dtype=complex)
    return (BasisFamily(vecs, "onb", "phi", model_id, D // 2),
            BasisFamily(vecs, "onb", "psi", model_id, D // 2))


def eigen_residuals(m: ModelBundle, phis: BasisFamily, psis: BasisFamily,
                    w: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Relative residuals of ``N φ_n = n φ_n`` and ``N† Ψ_n = n Ψ_n``, ``N = BA``."""
    w = m.window if w is None else w
    N = m.number_operator
    n = np.arange(phis.n_max + 1)
    r_phi = np.linalg.norm((N @ phis.vectors - n * phis.vectors)[:w], axis=0) / phis.norms()
    r_psi = np.linalg.norm((N.conj().T @ psis.vectors - n * psis.vectors)[:w], axis=0) / psis.norms()
    return r_phi, r_psi


def down_ladder_residuals(m: ModelBundle, phis: BasisFamily, w: int | None = None) -> np.ndarray:
    """``‖A φ_n - √n φ_{n-1}‖ / ‖φ_n‖`` on the window (``n = 0`` uses ``A φ_0``)."""
    w = m.window if w is None else w
    V = phis.vectors
    lowered = m.A @ V
    target = np.zeros_like(V)
    target[:, 1:] = np.sqrt(np.arange(1, V.shape[1])) * V[:, :-1]
    return np.linalg.norm((lowered - target)[:w], axis=0) / phis.norms()


def raising_norms(m: ModelBundle, kmax: int) -> np.ndarray:
    """``‖B^k φ_0‖`` for ``k = 0..kmax`` from the ladder vacuum."""
    phi0, _ = ladder_vacua(m)
    out = np.empty(kmax + 1)
    v = phi0
    for k in range(kmax + 1):
        out[k] = np.linalg.norm(v)
        v = m.B @ v
    return out


def vacuum_series_partial_norms(theta: float, terms: int) -> np.ndarray:
    """Partial sums of ``|c_0|² Σ tan^{2n}θ (2n-1)!!/(2n)!!``."""
    c0 = abs(vacuum_fock_constant(theta, "phi")) ** 2
    series = np.abs(squeezed_series(math.tan(theta), 2 * terms)[::2]) ** 2
    return c0 * np.cumsum(series)

