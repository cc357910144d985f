"""Experiment runner: reproduces the headline tables/figures as CSV files.

Every experiment is deterministic given its configuration and seed; re-runs
produce byte-identical CSV. A `.meta` sidecar records the resolved
configuration, its hash, and the run timestamp (the only non-reproducible
field). Exit codes: 0 ok, 2 invalid configuration, 3 infeasible parameters,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .design import design_closed_form, design_perfect_csi, rs_star_curve
from .errors import FeasibilityError, ParameterError
from .montecarlo import (
    SimConfig,
    empirical_pco,
    empirical_pso,
    empirical_rs_star,
    empirical_secrecy_capacity_bound,
    empirical_throughput,
)
from .outage import b1_min, feasibility_report, pco_qca, pso, r2_rate
from .params import SystemParams
from .throughput import (
    bits_for_fraction,
    build_equalized_quantizer,
    build_one_bit_quantizer,
    sweep_bit_allocation,
    throughput_exact_cgi,
    throughput_quantized_cgi,
)

EXPERIMENTS = (
    "design", "outage", "throughput", "table1",
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6",
    "sweep-tau", "bits-for-fraction", "montecarlo",
)

_EXIT_INVALID = 2
_EXIT_INFEASIBLE = 3
_EXIT_IO = 4

# Paper-caption defaults per figure experiment; every field can be overridden.
_FIG_DEFAULTS = {
    "fig1": dict(n=2, power=10.0, sigma=0.1, epsilon=0.05, b1=6, gain2=4.0,
                 draws=100000, codebook="grassmannian"),
    "fig2": dict(n=4, power=100.0, sigma=0.05, epsilon=0.01, gain2=4.0),
    "fig3": dict(n=4, power=100.0, sigma=0.1, epsilon=0.01, b1=10, gain2=4.0),
    "fig4": dict(n=4, power=10.0, sigma=0.05, epsilon=0.02, b1=10, delta=1e-4),
    "fig5": dict(n=4, power=10.0, sigma=0.05, epsilon=0.01, delta=1e-4, budget=40),
    "fig6": dict(n=4, power=20.0, sigma=0.03, epsilon=0.01, delta=1e-4, fraction=0.9),
}


def _parse_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sld",
        description="Artificial-noise beamforming with limited feedback: "
                    "design queries and reproduction experiments.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="flat key=value file; flags override it")
    parser.add_argument("--n", type=int, help="transmit antennas")
    parser.add_argument("--power", type=float, help="total transmit power, linear")
    parser.add_argument("--power-db", type=float, help="total transmit power in dB")
    parser.add_argument("--sigma", type=float, help="connection outage constraint")
    parser.add_argument("--epsilon", type=float, help="secrecy outage constraint")
    parser.add_argument("--b1", type=int, help="channel-direction feedback bits")
    parser.add_argument("--b2", type=int, help="channel-gain feedback bits")
    parser.add_argument("--delta", type=float, help="gain-quantizer truncation mass")
    parser.add_argument("--sigma-d2", type=float, help="receiver noise power")
    parser.add_argument("--sigma-g2", type=float, help="eavesdropper channel variance")
    parser.add_argument("--gain2", type=float, help="channel gain ||h||^2 for design queries")
    parser.add_argument("--budget", type=int, help="total feedback bits for sweep-tau")
    parser.add_argument("--fraction", type=float, help="target fraction for bits-for-fraction")
    parser.add_argument("--phi", type=float, help="power allocation ratio for outage tables")
    parser.add_argument("--rb", type=float, help="codeword rate for montecarlo checks")
    parser.add_argument("--seed", type=int, help="master seed (default 42)")
    parser.add_argument("--draws", type=int, help="Monte Carlo draws (default 100000)")
    parser.add_argument("--workers", type=int, help="Monte Carlo worker threads")
    parser.add_argument("--codebook", choices=("rvq", "grassmannian", "qca_synthetic"),
                        help="codebook source for Monte Carlo experiments")
    parser.add_argument("--points", type=int, help="points per sweep axis")
    parser.add_argument("--sweep", help="axis spec var:start:stop:points:lin|log "
                                        "(vars: power, gain2, b1, epsilon, sigma)")
    parser.add_argument("--out", help="output CSV path (default <experiment>.csv)")
    parser.add_argument("--json", action="store_true", help="machine-readable design output")
    return parser


_FLOAT_KEYS = ("power", "power_db", "sigma", "epsilon", "delta", "sigma_d2",
               "sigma_g2", "gain2", "fraction", "phi", "rb")
_INT_KEYS = ("n", "b1", "b2", "budget", "seed", "draws", "workers", "points")


def _resolve(args: argparse.Namespace) -> dict:
    """Merge per-experiment defaults, config file, and CLI flags."""
    cfg = dict(
        n=4, power=10.0, sigma=0.05, epsilon=0.01, b1=10, b2=0, delta=1e-4,
        sigma_d2=1.0, sigma_g2=1.0, gain2=4.0, seed=42, draws=100000,
        workers=1, codebook="qca_synthetic", points=13, budget=40,
        fraction=0.9, phi=0.3, rb=None, power_db=None, sweep=None,
        out=None, json=False,
    )
    cfg.update(_FIG_DEFAULTS.get(args.experiment, {}))
    if args.config:
        for key, raw in _parse_config_file(args.config).items():
            if key in _FLOAT_KEYS:
                cfg[key] = float(raw)
            elif key in _INT_KEYS:
                cfg[key] = int(raw)
            elif key in ("codebook", "sweep", "out"):
                cfg[key] = raw
            else:
                raise ParameterError(f"unknown config key {key!r}")
    for key, value in vars(args).items():
        if key in ("experiment", "config"):
            continue
        if value is not None and value is not False:
            cfg[key] = value
    if cfg.get("power_db") is not None:
        if args.power is not None:
            raise ParameterError("give either --power or --power-db, not both")
        cfg["power"] = 10.0 ** (cfg["power_db"] / 10.0)
    cfg["experiment"] = args.experiment
    return cfg


def _params(cfg: dict, **overrides) -> SystemParams:
    kw = dict(
        n=cfg["n"], p=cfg["power"], sigma_d2=cfg["sigma_d2"],
        sigma_co=cfg["sigma"], eps_so=cfg["epsilon"], b1=cfg["b1"],
        b2=cfg["b2"], delta=cfg["delta"], sigma_g2=cfg["sigma_g2"],
    )
    kw.update(overrides)
    return SystemParams(**kw)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, schema: str, header: list, rows: list, cfg: dict) -> None:
    lines = [f"# schema: {schema} v1", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
    config_items = sorted(
        (k, v) for k, v in cfg.items()
        if k not in ("out", "json") and v is not None
    )
    canonical = "\n".join(f"{k}={_fmt(v)}" for k, v in config_items)
    digest = hashlib.sha256(canonical.encode()).hexdigest()
    with open(path + ".meta", "w", encoding="ascii") as fh:
        fh.write(f"# sld run metadata\nversion={__version__}\n")
        fh.write(f"config_hash={digest}\ntimestamp={time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}\n")
        fh.write("baseline_convention=perfect-feedback baseline is the internal "
                 "b1->infinity limit with no (1-sigma) discount\n")
        fh.write(canonical + "\n")


def _sweep_axis(cfg: dict, default_var="power", default=(0.1, 100.0, None, "log")):
    spec = cfg.get("sweep")
    if spec is None:
        start, stop, points, scale = default
        return default_var, start, stop, points or cfg["points"], scale
    parts = spec.split(":")
    if len(parts) != 5:
        raise ParameterError(f"--sweep must be var:start:stop:points:lin|log, got {spec!r}")
    var, start, stop, points, scale = parts
    if scale not in ("lin", "log"):
        raise ParameterError(f"sweep scale must be lin or log, got {scale!r}")
    return var, float(start), float(stop), int(points), scale


def _axis_values(start, stop, points, scale):
    if scale == "log":
        if start <= 0:
            raise ParameterError("log sweep requires start > 0")
        return np.logspace(math.log10(start), math.log10(stop), points)
    return np.linspace(start, stop, points)


def _quantizer_for(params: SystemParams):
    if params.b2 == 0:
        return None
    if params.b2 == 1:
        return build_one_bit_quantizer(params)
    return build_equalized_quantizer(params)


# ---------------------------------------------------------------- experiments


def _run_design(cfg: dict) -> int:
    params = _params(cfg)
    try:
        design = design_closed_form(params, cfg["gain2"])
    except FeasibilityError as err:
        report = err.report or feasibility_report(params)
        if cfg["json"]:
            mu = report.mu_min if math.isfinite(report.mu_min) else None
            print(json.dumps({"feasible": False, "b1_min": report.b1_min,
                              "mu_min": mu, "note": report.note}))
        else:
            print(f"infeasible: {report.note}", file=sys.stderr)
            print(f"required CDI bits b1_min = {report.b1_min}", file=sys.stderr)
        return _EXIT_INFEASIBLE
    pco_res = pco_qca(params, design.rb_star, design.phi_star, cfg["gain2"]) - params.sigma_co \
        if 0 < design.phi_star < 1 else 0.0
    pso_res = pso(params, design.re_star, design.phi_star) - params.eps_so
    payload = {
        "phi_star": design.phi_star, "rb_star": design.rb_star,
        "re_star": design.re_star, "rs_star": design.rs_star,
        "phi_max": design.phi_max, "alpha": design.alpha, "beta": design.beta,
        "gamma": design.gamma, "pco_residual": pco_res, "pso_residual": pso_res,
    }
    if cfg["json"]:
        print(json.dumps(payload))
    elif cfg["out"]:
        _write_csv(cfg["out"], "design", list(payload), [list(payload.values())], cfg)
    else:
        print(f"phi* = {design.phi_star:.9f}   (phi_max = {design.phi_max:.9f})")
        print(f"rb*  = {design.rb_star:.9f} bits/use")
        print(f"re*  = {design.re_star:.9f} bits/use")
        print(f"rs*  = {design.rs_star:.9f} bits/use")
        print(f"constraint residuals: pco {pco_res:+.3e}, pso {pso_res:+.3e}")
    return 0


def _run_outage(cfg: dict) -> int:
    params = _params(cfg)
    phi = cfg["phi"]
    hi = r2_rate(params, phi, cfg["gain2"])
    if not math.isfinite(hi):
        hi = 30.0
    rates = np.linspace(0.0, hi, cfg["points"])
    rows = [
        [r, pco_qca(params, float(r), phi, cfg["gain2"]), pso(params, float(r), phi)]
        for r in rates
    ]
    out = cfg["out"] or "outage.csv"
    _write_csv(out, "outage", ["rate", "pco", "pso"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_throughput(cfg: dict) -> int:
    params = _params(cfg)
    var, start, stop, points, scale = _sweep_axis(cfg, "power", (1.0, 100.0, None, "log"))
    if var != "power":
        raise ParameterError("throughput sweeps only the power axis")
    rows = []
    for p_val in _axis_values(start, stop, points, scale):
        pp = params.replace(p=float(p_val))
        quantizer = _quantizer_for(pp)
        if quantizer is None:
            result = throughput_exact_cgi(pp)
        else:
            result = throughput_quantized_cgi(pp, quantizer)
        rows.append([p_val, result.eta, result.scheme, pp.b2])
    out = cfg["out"] or "throughput.csv"
    _write_csv(out, "throughput", ["p", "eta", "scheme", "b2"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_table1(cfg: dict) -> int:
    rows = []
    for sigma in (1.0, 0.1, 0.01):
        for epsilon in (1.0, 0.1, 0.01, 0.001):
            rows.append([sigma, epsilon, b1_min(sigma, epsilon)])
    out = cfg["out"] or "table1.csv"
    _write_csv(out, "table1", ["sigma", "epsilon", "b1_min"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_fig1(cfg: dict) -> int:
    rows = []
    phi_grid = np.linspace(0.03, 0.97, 33)
    powers = _axis_values(0.1, 100.0, cfg["points"], "log")
    for sigma in (0.01, 0.1):
        for p_val in powers:
            params = _params(cfg, p=float(p_val), sigma_co=sigma)
            rs_cf = float(rs_star_curve(params, np.asarray([cfg["gain2"]]))[0])
            sim = SimConfig(params=params, draws=cfg["draws"], seed=cfg["seed"],
                            codebook_source=cfg["codebook"], workers=cfg["workers"])
            rs_emp, std_err = empirical_rs_star(sim, cfg["gain2"], phi_grid,
                                                return_std_err=True)
            rows.append([p_val, sigma, rs_cf, rs_emp, std_err])
    out = cfg["out"] or "fig1.csv"
    _write_csv(out, "fig1", ["p", "sigma", "rs_closed_form", "rs_empirical", "std_err"],
               rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_fig2(cfg: dict) -> int:
    rows = []
    for sigma in (0.05, 0.1, 0.2):
        start = b1_min(sigma, cfg["epsilon"])
        for bits in range(start, 31):
            params = _params(cfg, sigma_co=sigma, b1=bits)
            try:
                design = design_closed_form(params, cfg["gain2"])
            except FeasibilityError:
                continue
            rows.append([bits, sigma, design.phi_star, design.rs_star])
    out = cfg["out"] or "fig2.csv"
    _write_csv(out, "fig2", ["b1", "sigma", "phi_star", "rs_star"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_fig3(cfg: dict) -> int:
    rows = []
    for p_val in _axis_values(5.0, 1e4, cfg["points"], "log"):
        params = _params(cfg, p=float(p_val))
        try:
            limited = design_closed_form(params, cfg["gain2"]).phi_star
        except FeasibilityError:
            limited = math.nan
        perfect = design_perfect_csi(params, cfg["gain2"]).phi_star
        rows.append([p_val, limited, perfect])
    out = cfg["out"] or "fig3.csv"
    _write_csv(out, "fig3", ["p", "phi_star_limited", "phi_star_perfect"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_fig4(cfg: dict) -> int:
    rows = []
    for p_val in _axis_values(1.0, 100.0, cfg["points"], "log"):
        base = _params(cfg, p=float(p_val))
        rows.append([p_val, "exact_cgi", 0, throughput_exact_cgi(base).eta])
        for bits in (1, 2, 3, 4, 5):
            params = base.replace(b2=bits)
            try:
                quantizer = _quantizer_for(params)
                eta = throughput_quantized_cgi(params, quantizer).eta
            except (FeasibilityError, ParameterError):
                eta = math.nan
            rows.append([p_val, "one_bit" if bits == 1 else "equalized", bits, eta])
    out = cfg["out"] or "fig4.csv"
    _write_csv(out, "fig4", ["p", "scheme", "b2", "eta"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_fig5(cfg: dict) -> int:
    rows = []
    for n in (2, 3, 4):
        for epsilon in np.logspace(-3, -1, 7):
            params = _params(cfg, n=n, eps_so=float(epsilon), b1=10, b2=2)
            sweep = sweep_bit_allocation(params, cfg["budget"])
            rows.append([epsilon, n, sweep.tau_star, sweep.tau_argmax, sweep.eta_max])
    out = cfg["out"] or "fig5.csv"
    _write_csv(out, "fig5", ["epsilon", "n", "tau_star", "tau_argmax", "eta_max"],
               rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_fig6(cfg: dict) -> int:
    rows = []
    for n in (2, 4):
        for epsilon in np.logspace(-3, -1, 5):
            params = _params(cfg, n=n, eps_so=float(epsilon), b1=10, b2=2)
            try:
                per_antenna = bits_for_fraction(params, cfg["fraction"])
            except FeasibilityError:
                per_antenna = math.nan
            rows.append([epsilon, n, cfg["fraction"], per_antenna])
    out = cfg["out"] or "fig6.csv"
    _write_csv(out, "fig6", ["epsilon", "n", "fraction", "bits_per_antenna"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _run_sweep_tau(cfg: dict) -> int:
    params = _params(cfg, b2=2)
    sweep = sweep_bit_allocation(params, cfg["budget"])
    rows = [
        [pt.tau, pt.b1, pt.b2, pt.eta, pt.tau == sweep.tau_argmax,
         pt.tau == sweep.tau_star, pt.approximated]
        for pt in sweep.points
    ]
    out = cfg["out"] or "sweep_tau.csv"
    _write_csv(out, "sweep-tau",
               ["tau", "b1", "b2", "eta", "is_argmax", "is_tau_star", "is_approximated"],
               rows, cfg)
    print(f"wrote {out} ({len(rows)} rows); tau* = {sweep.tau_star:.4f} "
          f"(argmax {sweep.tau_argmax:.4f})")
    return 0


def _run_bits_for_fraction(cfg: dict) -> int:
    params = _params(cfg, b2=2)
    per_antenna = bits_for_fraction(params, cfg["fraction"])
    total = int(round(per_antenna * params.n))
    rows = [[params.n, params.eps_so, cfg["fraction"], per_antenna, total]]
    out = cfg["out"] or "bits_for_fraction.csv"
    _write_csv(out, "bits-for-fraction",
               ["n", "epsilon", "fraction", "bits_per_antenna", "total_bits"], rows, cfg)
    print(f"wrote {out}; {per_antenna:g} bits/antenna ({total} total)")
    return 0


def _run_montecarlo(cfg: dict) -> int:
    params = _params(cfg)
    design = design_closed_form(params, cfg["gain2"])
    sim = SimConfig(params=params, draws=cfg["draws"], seed=cfg["seed"],
                    codebook_source=cfg["codebook"], workers=cfg["workers"])
    rows = []
    est = empirical_pco(sim, design.rb_star, design.phi_star, cfg["gain2"])
    rows.append(["pco_at_design", params.sigma_co, est.value, est.std_err, est.draws])
    est = empirical_pso(sim, design.re_star, design.phi_star)
    rows.append(["pso_at_design", params.eps_so, est.value, est.std_err, est.draws])
    eta = throughput_exact_cgi(params).eta
    tput = empirical_throughput(sim)
    rows.append(["throughput_realized", eta, tput.value, tput.std_err, tput.draws])
    rows.append(["throughput_discounted", eta, tput.discounted_value,
                 tput.discounted_std_err, tput.draws])
    bound = empirical_secrecy_capacity_bound(sim, cfg["gain2"])
    rows.append(["secrecy_capacity_outage", params.sigma_co + params.eps_so,
                 bound.value, bound.std_err, bound.draws])
    out = cfg["out"] or "montecarlo.csv"
    _write_csv(out, "montecarlo",
               ["quantity", "analytic", "empirical", "std_err", "draws"], rows, cfg)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


_RUNNERS = {
    "design": _run_design,
    "outage": _run_outage,
    "throughput": _run_throughput,
    "table1": _run_table1,
    "fig1": _run_fig1,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "sweep-tau": _run_sweep_tau,
    "bits-for-fraction": _run_bits_for_fraction,
    "montecarlo": _run_montecarlo,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        return _RUNNERS[args.experiment](cfg)
    except ParameterError as err:
        print(f"invalid configuration: {err}", file=sys.stderr)
        return _EXIT_INVALID
    except FeasibilityError as err:
        print(f"infeasible parameters: {err}", file=sys.stderr)
        if err.report is not None:
            print(f"required CDI bits b1_min = {err.report.b1_min}", file=sys.stderr)
        return _EXIT_INFEASIBLE
    except OSError as err:
        print(f"I/O failure: {err}", file=sys.stderr)
        return _EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
