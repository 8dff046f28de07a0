"""Command-line driver for the band, Dirac-point and soliton pipeline.

Config files are flat `key = value` text with Python-literal values.
Every JSON artifact embeds the fully resolved configuration and its
SHA-256 hash so outputs are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import ast
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import ansatz as az
from . import newton as nt
from .bloch import FourierCutoff, ParityClass, PeriodicPotential, band_sweep
from .dirac import certify_dirac_point, verify_gap_opening
from .homoclinic import NLDParams, integrate_homoclinic, kernel_check_on_Y


@dataclass
class RunConfig:
    V: list = field(default_factory=lambda: [[2, 20.0]])
    W: list = field(default_factory=lambda: [[1, 1.0]])
    M: int = 64
    pair: int = 1
    mu_sharp: float = 0.0
    a: float = 0.9
    deltas: list = field(default_factory=lambda: [0.1, 0.05, 0.025])
    h: float = 1.0 / 256.0
    L: float | None = None
    y_max: float | None = None
    ode_tol: float = 1e-10
    newton_tol: float = 1e-10
    newton_max_iters: int = 25
    n_bands: int = 12
    n_k: int = 129

    def potential_V(self) -> PeriodicPotential:
        return PeriodicPotential(
            {int(m): float(amp) for m, amp in self.V}, ParityClass.EVEN_INDEX
        )

    def potential_W(self) -> PeriodicPotential:
        return PeriodicPotential(
            {int(m): float(amp) for m, amp in self.W}, ParityClass.ODD_INDEX
        )

    def cutoff(self) -> FourierCutoff:
        return FourierCutoff(self.M)

    def validate(self):
        self.potential_V()
        self.potential_W()
        self.cutoff()
        if not 0.0 < self.a < 1.0:
            raise ValueError("a must lie in (0, 1)")
        for d in self.deltas:
            if not 0.0 < float(d) < 1.0:
                raise ValueError(
                    f"delta={d} outside (0, 1); delta = 0 has no soliton branch"
                )
        if self.h <= 0.0 or self.h > 1.0 / 64.0:
            raise ValueError("h must lie in (0, 1/64]")


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if not hasattr(cfg, key):
                raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
            try:
                setattr(cfg, key, ast.literal_eval(val.strip()))
            except (ValueError, SyntaxError) as exc:
                raise ValueError(f"{path}:{lineno}: bad value for '{key}': {exc}")
    for key, val in (overrides or {}).items():
        setattr(cfg, key, val)
    cfg.validate()
    return cfg


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _config_block(cfg: RunConfig) -> dict:
    resolved = asdict(cfg)
    canon = json.dumps(resolved, sort_keys=True)
    return {
        "config": resolved,
        "config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
    }


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: str, rows):
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def cmd_bands(cfg: RunConfig, out: Path) -> dict:
    pot = cfg.potential_V()
    k_grid = np.linspace(0.0, 2.0 * np.pi, cfg.n_k)
    sweep = band_sweep(pot, k_grid, cfg.cutoff())
    rows = []
    for sol in sweep.solutions:
        for n in range(min(cfg.n_bands, len(sol.eigenvalues))):
            rows.append((float(sol.k), n + 1, float(sol.eigenvalues[n])))
    _write_csv(out / "bands.csv", "k,band_index,mu", rows)
    summary = {
        "n_k": cfg.n_k,
        "n_bands": cfg.n_bands,
        "band_ranges": [
            [_fmt(np.min(sweep.band(n))), _fmt(np.max(sweep.band(n)))]
            for n in range(min(cfg.n_bands, cfg.cutoff().size))
        ],
        **_config_block(cfg),
    }
    _write_json(out / "bands.json", summary)
    return summary


def cmd_dirac(cfg: RunConfig, out: Path) -> dict:
    V, W = cfg.potential_V(), cfg.potential_W()
    data = certify_dirac_point(V, W, cfg.cutoff(), cfg.pair)
    payload = {
        "band_pair": list(data.band_pair),
        "mu_star": _fmt(data.mu_star),
        "c_sharp": _fmt(data.c_sharp),
        "theta_sharp": _fmt(data.theta_sharp),
        "beta1": _fmt(data.beta1),
        "beta2": _fmt(data.beta2),
        "cutoff": cfg.M,
        "potential_spec": {"V": cfg.V, "W": cfg.W},
        **_config_block(cfg),
    }
    _write_json(out / "dirac_point.json", payload)
    gaps = []
    for delta in cfg.deltas:
        rep = verify_gap_opening(V, W, data, float(delta), cfg.a)
        gaps.append(
            {
                "delta": _fmt(rep.delta),
                "a": _fmt(rep.a),
                "interval": [_fmt(rep.interval[0]), _fmt(rep.interval[1])],
                "gap_open": rep.gap_open,
                "half_gap_at_pi": _fmt(rep.half_gap_at_pi),
                "violations": [
                    [_fmt(k), n, _fmt(mu)] for k, n, mu in rep.violations
                ],
            }
        )
    _write_json(out / "gap_report.json", {"reports": gaps, **_config_block(cfg)})
    return payload


def _certified_params(cfg: RunConfig):
    data = certify_dirac_point(
        cfg.potential_V(), cfg.potential_W(), cfg.cutoff(), cfg.pair
    )
    params = NLDParams(
        c_sharp=data.c_sharp,
        theta_sharp=data.theta_sharp,
        mu_sharp=cfg.mu_sharp,
        beta1=data.beta1,
        beta2=data.beta2,
    )
    return data, params


def cmd_nld(cfg: RunConfig, out: Path) -> dict:
    data, params = _certified_params(cfg)
    profile = integrate_homoclinic(params, y_max=cfg.y_max, tol=cfg.ode_tol)
    psi = profile.psi_minus
    rows = [
        (
            float(y),
            float(u),
            float(v),
            float(p.real),
            float(p.imag),
            float(H),
        )
        for y, u, v, p, H in zip(
            profile.y_grid, profile.u, profile.v, psi, profile.hamiltonian_trace
        )
    ]
    _write_csv(out / "nld_profile.csv", "y,u,v,re_psi_minus,im_psi_minus,H", rows)
    kres = kernel_check_on_Y(params, profile)
    diag = {
        "decay_rate_fit": _fmt(profile.decay_rate_fit),
        "decay_rate_predicted": _fmt(params.decay_rate),
        "h_drift_max": _fmt(profile.h_drift_max),
        "sigma_min_restricted": _fmt(kres.sigma_min_restricted),
        "sigma_min_unrestricted": _fmt(kres.sigma_min_unrestricted),
        "operator_norm": _fmt(kres.operator_norm),
        **_config_block(cfg),
    }
    _write_json(out / "nld_diagnostics.json", diag)
    return diag


def cmd_soliton(cfg: RunConfig, out: Path) -> dict:
    V, W = cfg.potential_V(), cfg.potential_W()
    data, params = _certified_params(cfg)
    profile = integrate_homoclinic(params, y_max=cfg.y_max, tol=cfg.ode_tol)
    forcing = az.build_G1(data, profile)
    az.solvability_check(
        forcing, data, profile.y_grid[:: max(1, len(profile.y_grid) // 400)],
        fail_tol=1e-6,
    )
    corrector = az.solve_U1(forcing, data)
    parity = nt.parity_from_theta(data.theta_sharp)
    ncfg = nt.NewtonConfig(
        max_iters=cfg.newton_max_iters, tol=cfg.newton_tol, parity=parity
    )
    ell = 1.0 / params.decay_rate
    deltas, resid_norms, l2_errors, h2_errors = [], [], [], []
    per_delta = []
    for delta in cfg.deltas:
        delta = float(delta)
        L = cfg.L if cfg.L is not None else min(
            18.5 * ell, 0.995 * profile.y_max
        ) / delta
        fld = az.assemble_udelta(data, profile, True, delta, L, cfg.h, corrector)
        rnorm = az.residual_norm(fld, V, W)
        x_half = nt.staggered_grid(L, cfg.h)
        init, _, _ = az.evaluate_udelta(data, profile, True, delta, x_half, corrector)
        mu_delta = data.mu_star + delta * params.mu_sharp
        op = nt.discretize_operator(V, W, delta, mu_delta, x_half, parity)
        sol = nt.newton_solve(op, delta, mu_delta, init, ncfg)
        sol.jacobian_min_eig = nt.jacobian_min_eig(op, sol.samples)
        errs = nt.error_vs_ansatz(sol, data, profile)
        sol.error_vs_ansatz = errs
        tag = repr(delta).replace(".", "p")
        _write_csv(
            out / f"soliton_delta_{tag}.csv",
            "x,u",
            [(float(x), float(u)) for x, u in zip(sol.x_grid, sol.samples)],
        )
        deltas.append(delta)
        resid_norms.append(rnorm)
        l2_errors.append(errs[0])
        h2_errors.append(errs[1])
        per_delta.append(
            {
                "delta": _fmt(delta),
                "mu_delta": _fmt(mu_delta),
                "L": _fmt(L),
                "iters": len(sol.newton_history),
                "final_residual": _fmt(sol.newton_history[-1]),
                "l2_error": _fmt(errs[0]),
                "h2_error": _fmt(errs[1]),
                "jacobian_min_eig": _fmt(sol.jacobian_min_eig),
            }
        )
    report = {
        "deltas": [_fmt(d) for d in deltas],
        "residual_norms": [_fmt(r) for r in resid_norms],
        "fitted_residual_order": (
            _fmt(az.fit_order(deltas, resid_norms)) if len(deltas) >= 2 else None
        ),
        "h2_errors": [_fmt(e) for e in h2_errors],
        "fitted_error_order": (
            _fmt(az.fit_order(deltas, h2_errors)) if len(deltas) >= 2 else None
        ),
        "runs": per_delta,
        **_config_block(cfg),
    }
    _write_json(out / "soliton_scaling.json", report)
    return report


def cmd_verify_all(cfg: RunConfig, out: Path) -> dict:
    summary = {
        "bands": "bands.json",
        "dirac": "dirac_point.json",
        "nld": "nld_diagnostics.json",
        "soliton": "soliton_scaling.json",
    }
    cmd_bands(cfg, out)
    cmd_dirac(cfg, out)
    cmd_nld(cfg, out)
    cmd_soliton(cfg, out)
    _write_json(out / "verify_all.json", {"artifacts": summary, **_config_block(cfg)})
    return summary


def _seed_regressions(out: Path):
    golden = out / "golden"
    golden.mkdir(parents=True, exist_ok=True)
    for f in sorted(out.iterdir()):
        if f.is_file() and f.suffix in (".json", ".csv"):
            (golden / f.name).write_bytes(f.read_bytes())


COMMANDS = {
    "bands": cmd_bands,
    "dirac": cmd_dirac,
    "nld": cmd_nld,
    "soliton": cmd_soliton,
    "verify-all": cmd_verify_all,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diracsoliton",
        description="Band structures, Dirac points and Dirac solitons of "
        "1D periodic lattices",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None, help="key = value config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument(
        "--delta", default=None, help="comma-separated delta list override"
    )
    parser.add_argument(
        "--seed-regressions",
        action="store_true",
        help="copy produced artifacts into <out>/golden",
    )
    args = parser.parse_args(argv)
    try:
        overrides = {}
        if args.delta is not None:
            overrides["deltas"] = [float(s) for s in args.delta.split(",") if s]
        cfg = load_config(args.config, overrides)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        COMMANDS[args.command](cfg, out)
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.seed_regressions:
        _seed_regressions(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
