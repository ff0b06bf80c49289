"""Diagnostic runs and their JSON/CSV reports.

A report is a plain ordered ``dict``::

    schema      "pbx-report/1"
    config      echo of the run configuration
    suites      one entry per requested suite, canonical order
    summary     passed / failed / skipped suite names and an overall flag
    error       null, or {"type", "message"} after a numerical failure
    provenance  version, timestamp, d_stability, content_hash

Every suite entry holds ``status`` ("pass", "fail" or "skipped"), a list of
``checks`` (``name``, ``value``, ``threshold``, ``pass``) and free-form
``data``.  Thresholds are fixed multiples of the configured ``tol``.

``content_hash`` is the SHA-256 of the rendered report without its
provenance block, so two runs of one configuration share it.
"""

from __future__ import annotations

import cmath
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .basis import closed_form_family, eigen_residuals, down_ladder_residuals, intertwiner_family
from .basis import ladder_family, route_agreement
from .diagnostics import (expected_pairing, gram_biorthogonality, intertwining_check, pairing,
                          riesz_growth, s_operator_intertwiner_residual, truncation_stable_range)
from .errors import ParameterError, PbxError
from .fock import commutator, window_residual
from .models import EqhoParams, GeneralizedParams, SwansonParams, build_model
from .position import (Wavefunction, fock_coefficients, norm_alternate_form, norm_closed_form,
                       quad_inner, verify_biorthogonality_integral, verify_norm_formula,
                       verify_prudnikov)
from .special import legendre

SCHEMA = "pbx-report/1"
SUITES = ("commutators", "basis", "gram", "riesz", "intertwining", "position", "identities")
FORMATS = ("json", "csv")
# suites whose checks are recomputed at twice the dimension for the stability flag
D_SENSITIVE = ("commutators", "basis", "gram", "riesz", "intertwining", "position")
STABILITY_RATIO = 0.1
STABILITY_FLOOR = 0.01


class ConfigError(ParameterError):
    """Invalid run configuration (usage error)."""


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict
    D: int = 128
    n_max: int = 16
    tol: float = 1e-8
    suites: tuple = SUITES
    output_path: str | None = None
    format: str = "json"
    d_check: bool = True
    model_params: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.model not in ("eqho", "swanson", "generalized"):
            raise ConfigError(f"unknown model {self.model!r}")
        if int(self.D) != self.D or self.D < 8:
            raise ConfigError(f"--dim must be an integer >= 8, got {self.D}")
        if int(self.n_max) != self.n_max or not 1 <= self.n_max < self.D / 2:
            raise ConfigError(f"--nmax must satisfy 1 <= nmax < dim/2, got {self.n_max}")
        if not 1e-14 <= self.tol <= 1e-2:
            raise ConfigError(f"--tol must lie in [1e-14, 1e-2], got {self.tol}")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites: {', '.join(unknown)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.format == "csv" and not self.output_path:
            raise ConfigError("csv output needs --output (a directory)")
        ordered = tuple(s for s in SUITES if s in self.suites)
        object.__setattr__(self, "suites", ordered)
        object.__setattr__(self, "D", int(self.D))
        object.__setattr__(self, "n_max", int(self.n_max))
        try:
            if self.model == "eqho":
                mp = EqhoParams(self.params["beta"])
            elif self.model == "swanson":
                mp = SwansonParams(self.params["theta"])
            else:
                mp = GeneralizedParams(self.params["alpha"], self.params["beta_g"])
        except KeyError as exc:
            raise ConfigError(f"missing model parameter {exc}") from None
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "model_params", mp)

    def echo(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "dim": self.D,
            "nmax": self.n_max,
            "tol": self.tol,
            "suites": list(self.suites),
            "format": self.format,
        }


def _check(name, value, threshold):
    value = float(value)
    return {"name": name, "value": value, "threshold": threshold, "pass": bool(value < threshold)}


def _suite(checks, data=None):
    status = "pass" if all(c["pass"] for c in checks) else "fail"
    return {"status": status, "checks": checks, "data": data or {}}


def _skipped(reason):
    return {"status": "skipped", "reason": reason, "checks": [], "data": {}}


class _Context:
    """Lazily built model and families shared by the suites of one run."""

    def __init__(self, cfg: RunConfig, dim: int):
        self.cfg = cfg
        self.window = cfg.D // 2
        self.model = build_model(cfg.model_params, dim)
        self._ladder = None

    @property
    def named(self):
        return self.cfg.model in ("eqho", "swanson")

    @property
    def ladder(self):
        if self._ladder is None:
            self._ladder = ladder_family(self.model, self.cfg.n_max)
        return self._ladder


def suite_commutators(ctx: _Context):
    m, tol = ctx.model, ctx.cfg.tol
    res = window_residual(commutator(m.A, m.B), 1.0, ctx.window)
    return _suite([_check("commutator_AB_minus_I", res, 1e-4 * tol)])


def suite_basis(ctx: _Context):
    m, cfg, tol, w = ctx.model, ctx.cfg, ctx.cfg.tol, ctx.window
    phis, psis = ctx.ladder
    checks = [
        _check("vacuum_phi_residual", float(np.linalg.norm((m.A @ phis[0])[:w])), tol),
        _check("vacuum_psi_residual", float(np.linalg.norm((m.B.conj().T @ psis[0])[:w])), tol),
    ]
    r_phi, r_psi = eigen_residuals(m, phis, psis, w)
    checks += [
        _check("eigen_phi_max", float(r_phi.max()), tol),
        _check("eigen_psi_max", float(r_psi.max()), tol),
        _check("down_ladder_max", float(down_ladder_residuals(m, phis, w).max()), tol),
    ]
    n_route = min(12, cfg.n_max)
    lad = ladder_family(m, n_route)
    cf = closed_form_family(m, n_route)
    dev_cf = max(route_agreement(lad[0], cf[0]).max_dev, route_agreement(lad[1], cf[1]).max_dev)
    checks.append(_check("route_ladder_closed_form", dev_cf, 100 * tol))
    n_int = min(n_route, ctx.window // 2 - 1)
    _, _, agree = intertwiner_family(m, n_int, reference=ladder_family(m, n_int))
    checks.append(_check("route_ladder_intertwiner", agree.max_dev, 100 * tol))
    ratios = np.abs(agree.alpha_per_n) / abs(agree.alpha_est)
    checks.append(_check("intertwiner_constant_spread", float(np.abs(ratios - 1).max()), 100 * tol))
    if isinstance(cfg.model_params, EqhoParams):
        target = math.exp(-1.0 / cfg.model_params.beta ** 2)
        checks.append(_check("intertwiner_constant_error", abs(agree.alpha_est - target), 100 * tol))
    data = {"alpha_est": agree.alpha_est, "alpha_psi": agree.alpha_psi,
            "route_intertwiner_per_n": agree.per_n.tolist()}
    return _suite(checks, data)


def suite_gram(ctx: _Context):
    phis, psis = ctx.ladder
    p = expected_pairing(ctx.model)
    if p is None:
        p = pairing(phis, psis)
    rep = gram_biorthogonality(phis, psis, p)
    tol = ctx.cfg.tol * abs(p)
    checks = [_check("max_offdiag", rep.max_offdiag, tol), _check("max_diag_dev", rep.max_diag_dev, tol)]
    data = {"expected_diag": rep.expected_diag, "diag": np.diag(rep.gram).tolist(),
            "gram": rep.gram.tolist()}
    return _suite(checks, data)


def suite_riesz(ctx: _Context):
    cfg = ctx.cfg
    phis, psis = ctx.ladder
    stable_to = truncation_stable_range(cfg.model_params, ctx.model.D, cfg.n_max)
    stable = stable_to >= 1
    hi = stable_to if stable else cfg.n_max
    v = riesz_growth(phis, psis, (0, hi), stable=stable)
    checks = [{"name": "verdict", "value": v.verdict, "threshold": "not_riesz",
               "pass": v.verdict == "not_riesz"}]
    if isinstance(cfg.model_params, SwansonParams):
        n = np.arange(min(12, cfg.n_max) + 1)
        ref = np.array([legendre(int(k), ctx.model.params.omega) for k in n])
        dev = float(np.abs(v.r[n] / v.r[0] / ref - 1).max())
        checks.append(_check("norm_ratio_vs_legendre", dev, 100 * cfg.tol))
    data = {"r": v.r.tolist(), "growth_rate": v.growth_rate, "fit_range": list(v.fit_range),
            "unstable": v.unstable}
    return _suite(checks, data)


def suite_intertwining(ctx: _Context):
    m, cfg, tol = ctx.model, ctx.cfg, ctx.cfg.tol
    w = ctx.window // 2
    checks = [_check("HW_minus_Wh", window_residual(m.H @ m.W - m.W @ m.h_ref, 0.0, w), 10 * tol)]
    if ctx.named:
        res = window_residual(m.W @ m.H.conj().T - m.h_ref @ m.W, 0.0, w)
        checks.append(_check("WHdag_minus_hW", res, 10 * tol))
    phis, psis = ctx.ladder
    r1, r2 = intertwining_check(m, phis, psis, gram_tol=None)
    checks += [_check("S_psi_N_minus_Ndag_S_psi", r1, 1e5 * tol),
               _check("N_S_phi_minus_S_phi_Ndag", r2, 1e5 * tol)]
    if isinstance(cfg.model_params, EqhoParams):
        n_int = min(cfg.n_max, ctx.window // 2 - 1)
        _, _, agree = intertwiner_family(m, n_int, reference=ladder_family(m, n_int))
        res = s_operator_intertwiner_residual(m, phis, psis, agree.alpha_est, gram_tol=None)
        checks.append(_check("S_phi_minus_W_Wdag", res, 1e4 * tol))
    return _suite(checks)


def _wavefunction_tag(cfg):
    if isinstance(cfg.model_params, EqhoParams):
        return "eqho", cfg.model_params.beta
    return "swanson", cfg.model_params.theta


def suite_position(ctx: _Context):
    cfg, tol = ctx.cfg, ctx.cfg.tol
    if not ctx.named:
        return _skipped("no position-space closed forms for this model")
    tag, par = _wavefunction_tag(cfg)
    phis, psis = ctx.ladder
    n_top = min(10, cfg.n_max)
    k = ctx.window
    worst = 0.0
    for side, fam in (("phi", phis), ("psi", psis)):
        for n in range(n_top + 1):
            coeffs = fock_coefficients(Wavefunction(tag, side, n, par), k)
            worst = max(worst, float(np.abs(coeffs - fam[n][:k]).max() / np.linalg.norm(fam[n])))
    p = expected_pairing(ctx.model)
    gram = np.empty((n_top + 1, n_top + 1), dtype=complex)
    for n in range(n_top + 1):
        for mm in range(n_top + 1):
            gram[n, mm] = quad_inner(Wavefunction(tag, "psi", n, par), Wavefunction(tag, "phi", mm, par))
    bio = float(np.abs(gram - p * np.eye(n_top + 1)).max())
    checks = [_check("fock_projection_max", worst, 10 * tol),
              _check("position_gram_dev", bio, tol * abs(p))]
    return _suite(checks)


def suite_identities(ctx: _Context):
    cfg, tol = ctx.cfg, ctx.cfg.tol
    if not isinstance(cfg.model_params, SwansonParams):
        return _skipped("integral identities concern the Swanson family")
    theta = cfg.model_params.theta
    c2 = math.cos(2 * theta)
    u = cmath.exp(1j * theta)
    top = 12
    prud = max(verify_prudnikov(n, c2, u, u.conjugate()).deviation for n in range(top + 1))
    norm = max(verify_norm_formula(theta, n).deviation for n in range(top + 1))
    bio = max(verify_biorthogonality_integral(n, m, theta).deviation
              for n in range(top + 1) for m in range(top + 1))
    checks = [_check("prudnikov_max_dev", prud, 0.1 * tol),
              _check("norm_formula_max_dev", norm, tol),
              _check("biorthogonality_integral_max_dev", bio, tol)]
    n0 = verify_norm_formula(theta, 0).value
    b0 = verify_biorthogonality_integral(1, 1, theta)
    data = {
        "discrepancies": [
            {"quantity": "norm_prefactor_n0", "quadrature": n0,
             "derived": norm_closed_form(theta, 0), "alternate": norm_alternate_form(theta, 0)},
            {"quantity": "biorthogonality_integral_n1", "quadrature": b0.value,
             "derived": cmath.exp(1j * theta) * b0.reference, "alternate": b0.reference},
        ]
    }
    return _suite(checks, data)


SUITE_RUNNERS = {
    "commutators": suite_commutators,
    "basis": suite_basis,
    "gram": suite_gram,
    "riesz": suite_riesz,
    "intertwining": suite_intertwining,
    "position": suite_position,
    "identities": suite_identities,
}


def _run_suites(cfg: RunConfig, dim: int, names) -> dict:
    ctx = _Context(cfg, dim)
    return {name: SUITE_RUNNERS[name](ctx) for name in names}


def _stable(a, b):
    if not (isinstance(a["value"], float) and isinstance(b["value"], float)):
        return a["value"] == b["value"]
    big = max(abs(a["value"]), abs(b["value"]))
    return abs(a["value"] - b["value"]) <= STABILITY_RATIO * big or big < STABILITY_FLOOR * a["threshold"]


def d_stability(cfg: RunConfig, suites: dict) -> bool | None:
    """Recompute the dimension-sensitive suites at ``2 D`` with the same windows."""
    names = [s for s in suites if s in D_SENSITIVE and suites[s]["status"] != "skipped"]
    if not names:
        return None
    doubled = _run_suites(cfg, 2 * cfg.D, names)
    for name in names:
        for a, b in zip(suites[name]["checks"], doubled[name]["checks"]):
            if not _stable(a, b):
                return False
    return True


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
            else _dt.datetime.now(_dt.timezone.utc))
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def run(cfg: RunConfig) -> dict:
    """Execute the configured suites; numerical failures end up in ``error``."""
    report = {"schema": SCHEMA, "config": cfg.echo(), "suites": {}, "summary": {}, "error": None}
    stability = None
    try:
        report["suites"] = _run_suites(cfg, cfg.D, cfg.suites)
        if cfg.d_check:
            stability = d_stability(cfg, report["suites"])
    except PbxError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    suites = report["suites"]
    report["summary"] = {
        "passed": [s for s in suites if suites[s]["status"] == "pass"],
        "failed": [s for s in suites if suites[s]["status"] == "fail"],
        "skipped": [s for s in suites if suites[s]["status"] == "skipped"],
        "all_pass": report["error"] is None and all(s["status"] != "fail" for s in suites.values()),
    }
    report["provenance"] = {
        "version": __version__,
        "timestamp": _timestamp(),
        "d_stability": stability,
        "content_hash": content_hash(report),
    }
    return report


def exit_code(report: dict) -> int:
    if report["error"] is not None:
        return 3
    return 0 if report["summary"]["all_pass"] else 1


# ---------------------------------------------------------------- rendering

def _number(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite number in report: {x}")
    return format(x, ".17g")


def _encode(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_number(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _encode({"re": float(obj.real), "im": float(obj.imag)}, out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(k), ensure_ascii=False) + ":")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def render_json(report: dict) -> bytes:
    """Compact JSON, keys in insertion order, floats with 17 significant digits."""
    out = []
    _encode(report, out)
    return ("".join(out) + "\n").encode("utf-8")


def content_hash(report: dict) -> str:
    body = {k: v for k, v in report.items() if k != "provenance"}
    return hashlib.sha256(render_json(body)).hexdigest()


def _decode_complex(obj):
    if set(obj) == {"re", "im"}:
        return complex(obj["re"], obj["im"])
    return obj


def parse_report(data) -> dict:
    """Inverse of :func:`render_json`; ``{"re", "im"}`` objects become complex."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data, object_hook=_decode_complex)


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue().encode("utf-8")


def render_csv(report: dict) -> dict:
    """One CSV document per suite, keyed by file name."""
    files = {}
    for name, suite in report["suites"].items():
        if name == "gram" and suite["data"]:
            gram = suite["data"]["gram"]
            rows = [(n, m, complex(v).real, complex(v).imag)
                    for n, row in enumerate(gram) for m, v in enumerate(row)]
            files[f"{name}.csv"] = _csv_bytes(["n", "m", "gram_re", "gram_im"], rows)
        else:
            rows = [(c["name"], c["value"], c["threshold"], str(c["pass"]).lower())
                    for c in suite["checks"]]
            files[f"{name}.csv"] = _csv_bytes(["check", "value", "threshold", "pass"], rows)
    return files


def write_report(report: dict, fmt: str, output_path: str | None, stream=None) -> None:
    """Write to ``output_path`` (a file for JSON, a directory for CSV) or ``stream``."""
    if fmt == "json":
        payload = render_json(report)
        if output_path in (None, "-"):
            stream.write(payload.decode("utf-8"))
        else:
            with open(output_path, "wb") as fh:
                fh.write(payload)
        return
    os.makedirs(output_path, exist_ok=True)
    for fname, payload in render_csv(report).items():
        with open(os.path.join(output_path, fname), "wb") as fh:
            fh.write(payload)
