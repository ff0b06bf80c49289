"""Numerical checks of biorthogonality, S-operators, expansions and growth.

The pairing ``p = <Ψ_0, φ_0>`` enters everywhere as a normalization: the
Gram matrix should equal ``p I``, the expansion of ``f`` reads
``f = Σ <Ψ_n, f> φ_n / p``, and the partial-sum S-operators are divided by
``|p|`` so that they stay Hermitian and satisfy ``S_Ψ S_φ -> I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import BasisFamily, ladder_family
from .errors import BiorthogonalityError
from .fock import window_residual
from .models import EqhoParams, ModelBundle, SwansonParams, build_model

GROWTH_THRESHOLD = 0.05
SPREAD_FACTOR = 2.0
GRAM_TOL = 1e-6
HIGH_MODE_TOL = 1e-10
VERDICTS = ("riesz_plausible", "not_riesz", "inconclusive")


@dataclass(frozen=True, eq=False)
class GramReport:
    gram: np.ndarray
    expected_diag: complex
    max_offdiag: float
    max_diag_dev: float


@dataclass(frozen=True, eq=False)
class RieszVerdict:
    """``r_n = ‖φ_n‖ ‖Ψ_n‖``, its fitted log-slope and the resulting verdict.

    ``unstable`` marks a fit range that was not confirmed stable under a
    change of truncation; the verdict is then ``inconclusive``.
    """

    r: np.ndarray
    growth_rate: float
    verdict: str
    fit_range: tuple[int, int]
    unstable: bool = False


class SOperators(NamedTuple):
    s_phi: np.ndarray
    s_psi: np.ndarray
    residual: float


class ExpansionReport(NamedTuple):
    errors: np.ndarray
    high_mode: list


def _check_pair(phis: BasisFamily, psis: BasisFamily):
    if phis.side != "phi" or psis.side != "psi":
        raise ValueError("expected a (phi, psi) pair of families")
    if phis.model_id != psis.model_id or phis.n_max != psis.n_max or phis.dim != psis.dim:
        raise ValueError(
            f"families do not match: {phis.model_id}/{phis.n_max} vs {psis.model_id}/{psis.n_max}"
        )


def pairing(phis: BasisFamily, psis: BasisFamily) -> complex:
    """``<Ψ_0, φ_0>``."""
    return complex(np.vdot(psis[0], phis[0]))


def expected_pairing(m: ModelBundle) -> complex | None:
    """Model value of ``<Ψ_0, φ_0>`` under the package normalization, if known."""
    if isinstance(m.params, EqhoParams):
        return complex(math.exp(-2.0 / m.params.beta ** 2))
    if isinstance(m.params, SwansonParams):
        return 1.0 + 0j
    return None


def effective_window(n_max: int) -> int:
    """Window on which partial sums over ``n <= n_max`` are trusted."""
    return max(1, min(8, n_max // 3))


def gram_biorthogonality(phis: BasisFamily, psis: BasisFamily, expected_diag: complex) -> GramReport:
    """``gram[n, m] = <Ψ_n, φ_m>`` compared with ``expected_diag * I``."""
    _check_pair(phis, psis)
    gram = psis.vectors.conj().T @ phis.vectors
    off = gram - np.diag(np.diag(gram))
    return GramReport(
        gram=gram,
        expected_diag=complex(expected_diag),
        max_offdiag=float(np.abs(off).max()) if gram.shape[0] > 1 else 0.0,
        max_diag_dev=float(np.abs(np.diag(gram) - expected_diag).max()),
    )


def build_s_operators(phis: BasisFamily, psis: BasisFamily, gram_tol: float | None = GRAM_TOL) -> SOperators:
    """Partial sums ``S_φ = Σ |φ_n><φ_n| / |p|`` and ``S_Ψ = Σ |Ψ_n><Ψ_n| / |p|``.

    The third entry is ``window_residual(S_Ψ S_φ, I, w_eff)``.  The families
    must be biorthogonal to relative accuracy ``gram_tol``
    (``BiorthogonalityError`` otherwise); ``gram_tol=None`` skips the check.
    """
    _check_pair(phis, psis)
    p = pairing(phis, psis)
    if gram_tol is not None:
        rep = gram_biorthogonality(phis, psis, p)
        dev = max(rep.max_offdiag, rep.max_diag_dev) / abs(p)
        if not dev <= gram_tol:
            raise BiorthogonalityError(
                f"families are not biorthogonal: relative Gram deviation {dev:.3g} > {gram_tol:.3g}"
            )
    s_phi = phis.vectors @ phis.vectors.conj().T / abs(p)
    s_psi = psis.vectors @ psis.vectors.conj().T / abs(p)
    residual = window_residual(s_psi @ s_phi, 1.0, effective_window(phis.n_max))
    return SOperators(s_phi, s_psi, residual)


def resolution_of_identity(phis: BasisFamily, psis: BasisFamily, test_vectors,
                           n_max_sweep) -> ExpansionReport:
    """Relative errors of the truncated expansions ``Σ_{n<=N} <Ψ_n, f> φ_n / p``.

    ``errors[t, j]`` belongs to test vector ``t`` and ``N = n_max_sweep[j]``.
    ``high_mode[t]`` flags test vectors with relative mass above ``1e-10``
    at indices ``>= window/4``.
    """
    _check_pair(phis, psis)
    p = pairing(phis, psis)
    sweep = [int(N) for N in n_max_sweep]
    if any(not 0 <= N <= phis.n_max for N in sweep):
        raise ValueError(f"sweep values must lie in [0, {phis.n_max}]")
    cut = phis.window // 4
    errors = np.empty((len(test_vectors), len(sweep)))
    flags = []
    for t, f in enumerate(test_vectors):
        f = np.asarray(f, dtype=complex)
        fnorm = np.linalg.norm(f)
        flags.append(bool(np.linalg.norm(f[cut:]) > HIGH_MODE_TOL * fnorm))
        coeffs = psis.vectors.conj().T @ f / p
        partial = np.cumsum(phis.vectors * coeffs, axis=1)
        for j, N in enumerate(sweep):
            errors[t, j] = np.linalg.norm(f - partial[:, N]) / fnorm
    return ExpansionReport(errors, flags)


def riesz_growth(phis: BasisFamily, psis: BasisFamily, fit_range: tuple[int, int] | None = None,
                 stable: bool = True) -> RieszVerdict:
    """Classify the growth of ``r_n = ‖φ_n‖ ‖Ψ_n‖`` over ``fit_range`` (inclusive).

    ``not_riesz``: ``r`` strictly increasing and log-slope above 0.05.
    ``riesz_plausible``: ``max r <= 2 min r``.  Otherwise, or when the range
    is flagged as not truncation-stable, ``inconclusive``.
    """
    _check_pair(phis, psis)
    r = phis.norms() * psis.norms()
    lo, hi = (0, phis.n_max) if fit_range is None else (int(fit_range[0]), int(fit_range[1]))
    if not 0 <= lo < hi <= phis.n_max:
        raise ValueError(f"fit range ({lo}, {hi}) must satisfy 0 <= lo < hi <= {phis.n_max}")
    seg = r[lo: hi + 1]
    n = np.arange(lo, hi + 1)
    slope = float(np.polyfit(n, np.log(seg), 1)[0])
    if not stable:
        verdict = "inconclusive"
    elif np.all(np.diff(seg) > 0) and slope > GROWTH_THRESHOLD:
        verdict = "not_riesz"
    elif seg.max() <= SPREAD_FACTOR * seg.min():
        verdict = "riesz_plausible"
    else:
        verdict = "inconclusive"
    return RieszVerdict(r, slope, verdict, (lo, hi), unstable=not stable)


def truncation_stable_range(params, D: int, n_max: int, tol: float = 1e-6) -> int:
    """Largest ``n`` such that ladder families at ``D`` and ``2D`` agree up to ``n``.

    Agreement is relative, over the leading ``D`` coefficients, on both sides.
    Returns ``-1`` if even the vacua disagree.
    """
    small = ladder_family(build_model(params, D), n_max)
    large = ladder_family(build_model(params, 2 * D), n_max)
    worst = np.zeros(n_max + 1)
    for f, g in zip(small, large):
        dev = np.linalg.norm(f.vectors - g.vectors[:D], axis=0) / np.linalg.norm(g.vectors, axis=0)
        worst = np.maximum(worst, dev)
    bad = np.nonzero(~(worst < tol))[0]
    return int(bad[0]) - 1 if bad.size else n_max


def intertwining_check(m: ModelBundle, phis: BasisFamily, psis: BasisFamily,
                       gram_tol: float | None = GRAM_TOL) -> tuple[float, float]:
    """Residuals of ``S_Ψ N - N† S_Ψ`` and ``N S_φ - S_φ N†`` on ``w_eff``, ``N = BA``."""
    s_phi, s_psi, _ = build_s_operators(phis, psis, gram_tol)
    N = m.number_operator
    Nd = N.conj().T
    w = effective_window(phis.n_max)
    return (window_residual(s_psi @ N - Nd @ s_psi, 0.0, w),
            window_residual(N @ s_phi - s_phi @ Nd, 0.0, w))


def s_operator_intertwiner_residual(m: ModelBundle, phis: BasisFamily, psis: BasisFamily,
                                    kappa: complex, gram_tol: float | None = GRAM_TOL) -> float:
    """``S_φ`` against ``(|κ|² / |p|) W W†`` on ``w_eff``.

    For the EQHO the prefactor is 1 and ``W W† = V²``.
    """
    s_phi, _, _ = build_s_operators(phis, psis, gram_tol)
    p = pairing(phis, psis)
    target = abs(kappa) ** 2 / abs(p) * (m.W @ m.W.conj().T)
    return window_residual(s_phi, target, effective_window(phis.n_max))
