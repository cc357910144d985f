"""Optimal wiretap-coding rates and signal/noise power split for one channel.

The objective is the secret rate rb_max(phi) - re_min(phi) over the power
allocation ratio phi. Both outage constraints are active at the optimum, so
the problem reduces to a one-dimensional maximization with a closed-form
interior solution; a golden-section oracle provides an independent check and
a fallback for the degenerate corners where the closed form is 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, ParameterError
from .outage import (
    eve_sir_factor,
    feasibility_report,
    outage_error_quantile,
    rb_max,
    re_min,
)
from .params import SystemParams

_RS_CLAMP = 1e-12


@dataclass(frozen=True)
class RateDesign:
    """Chosen power split and rates, plus the intermediates that produced them.

    alpha and beta are the worst-case signal and per-dimension leakage powers
    at the receiver (alpha + (n-1) beta = ||h||^2 p); gamma is the
    eavesdropper SIR factor enforcing the secrecy constraint.
    """

    phi_star: float
    rb_star: float
    re_star: float
    rs_star: float
    alpha: float
    beta: float
    gamma: float
    phi_max: float


def _alpha_beta(params: SystemParams, gain2: float):
    q = outage_error_quantile(params)
    alpha = gain2 * params.p * (1.0 - q)
    beta = gain2 * params.p * q / (params.n - 1)
    return alpha, beta


def _golden_max(f, a: float, b: float, tol: float) -> float:
    """Golden-section maximizer on [a, b] to bracket width tol."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _check_feasible(params: SystemParams, gain2: float):
    report = feasibility_report(params)
    if not report.feasible_bits:
        raise FeasibilityError(report.note, report=report)
    if not gain2 > report.mu_min:
        raise FeasibilityError(
            f"gain2={gain2!r} is at or below the transmit threshold "
            f"mu_min={report.mu_min:.6g}",
            report=report,
        )
    return report


def _rates_at(alpha: float, beta: float, gamma: float, sigma_d2: float, phi: float):
    rb = math.log2(1.0 + alpha * phi / (beta * (1.0 - phi) + sigma_d2))
    re = 0.0 if gamma == 0.0 else math.log2(1.0 + gamma * phi / (1.0 - phi))
    rs = rb - re
    if rs < 0.0:
        rs = 0.0 if rs > -_RS_CLAMP else rs
    return rb, re, max(rs, 0.0)


def _phi_closed_form(alpha: float, beta: float, gamma: float, sigma_d2: float) -> float:
    core = alpha - beta * gamma
    num = (beta + sigma_d2) * core - math.sqrt(
        max(core + sigma_d2 * (1.0 - gamma), 0.0)
    ) * math.sqrt(max(alpha * gamma * sigma_d2 * (beta + sigma_d2), 0.0))
    den = beta * core + alpha * sigma_d2 * (1.0 - gamma)
    if den == 0.0:
        return math.nan
    return num / den


def design_closed_form(params: SystemParams, gain2: float) -> RateDesign:
    """Throughput-optimal (phi, rb, re) for a given channel gain.

    Both outage constraints hold with equality at the returned design. With
    eps_so = 1 or sigma_d2 = 0 the objective is increasing in phi and only a
    boundary supremum exists; the returned design is that phi -> 1 limit.
    """
    report = _check_feasible(params, gain2)
    alpha, beta = _alpha_beta(params, gain2)
    gamma = eve_sir_factor(params.n, params.eps_so)
    phi_cap = 1.0 - report.mu_min / gain2

    if gamma == 0.0:
        # No secrecy constraint: all power to the signal.
        rb = (
            math.inf
            if params.sigma_d2 == 0.0
            else math.log2(1.0 + alpha / params.sigma_d2)
        )
        return RateDesign(1.0, rb, 0.0, rb, alpha, beta, gamma, phi_cap)
    if params.sigma_d2 == 0.0:
        # Noise-free receiver: rates diverge but their difference does not.
        rs = math.log2(alpha / (beta * gamma))
        return RateDesign(1.0, math.inf, math.inf, rs, alpha, beta, gamma, phi_cap)

    phi = _phi_closed_form(alpha, beta, gamma, params.sigma_d2)
    if not (math.isfinite(phi) and 0.0 < phi < phi_cap):
        # 0/0 corner of the formula (e.g. gamma = 1 with beta = 0); the
        # optimum is still interior and unique, so refine numerically.
        phi = _golden_max(
            lambda x: _rates_at(alpha, beta, gamma, params.sigma_d2, x)[2],
            0.0,
            phi_cap,
            1e-13,
        )
    rb, re, rs = _rates_at(alpha, beta, gamma, params.sigma_d2, phi)
    return RateDesign(phi, rb, re, rs, alpha, beta, gamma, phi_cap)


def design_numeric(params: SystemParams, gain2: float, tolerance: float = 1e-8) -> RateDesign:
    """Independent oracle: bracketing grid plus golden-section maximization.

    The 256-point grid turns the assumed unimodality into a checked
    assumption before the local search narrows to `tolerance` in phi.
    """
    if not tolerance > 0:
        raise ParameterError(f"tolerance must be > 0, got {tolerance!r}")
    report = _check_feasible(params, gain2)
    alpha, beta = _alpha_beta(params, gain2)
    gamma = eve_sir_factor(params.n, params.eps_so)
    if gamma == 0.0 or params.sigma_d2 == 0.0:
        return design_closed_form(params, gain2)
    phi_cap = 1.0 - report.mu_min / gain2

    def objective(phi: float) -> float:
        return rb_max(params, phi, gain2) - re_min(params, phi)

    grid = phi_cap * (np.arange(1, 257) / 257.0)
    values = [objective(p) for p in grid]
    k = int(np.argmax(values))
    lo = grid[k - 1] if k > 0 else grid[0] / 257.0
    hi = grid[k + 1] if k < 255 else phi_cap
    phi = _golden_max(objective, lo, hi, tolerance)
    rb, re, rs = _rates_at(alpha, beta, gamma, params.sigma_d2, phi)
    return RateDesign(phi, rb, re, rs, alpha, beta, gamma, phi_cap)


def design_perfect_csi(params: SystemParams, gain2: float) -> RateDesign:
    """Baseline with unquantized feedback: the b1 -> infinity limit.

    Quantization error vanishes, so there is no noise leakage (beta = 0), no
    connection outage, and the worst-case signal power is the full gain.
    Returns an all-zero design when the gain is below the perfect-feedback
    transmit threshold (including gain2 = 0).
    """
    gamma = eve_sir_factor(params.n, params.eps_so)
    alpha = gain2 * params.p
    threshold = gamma * params.sigma_d2 / params.p
    if gain2 <= threshold or gain2 <= 0.0:
        return RateDesign(0.0, 0.0, 0.0, 0.0, alpha, 0.0, gamma, 0.0)
    phi_cap = 1.0 - threshold / gain2

    if gamma == 0.0:
        rb = (
            math.inf
            if params.sigma_d2 == 0.0
            else math.log2(1.0 + alpha / params.sigma_d2)
        )
        return RateDesign(1.0, rb, 0.0, rb, alpha, 0.0, gamma, phi_cap)
    if params.sigma_d2 == 0.0:
        return RateDesign(1.0, math.inf, math.inf, math.inf, alpha, 0.0, gamma, phi_cap)

    phi = _phi_closed_form(alpha, 0.0, gamma, params.sigma_d2)
    if not (math.isfinite(phi) and 0.0 < phi < phi_cap):
        phi = _golden_max(
            lambda x: _rates_at(alpha, 0.0, gamma, params.sigma_d2, x)[2],
            0.0,
            phi_cap,
            1e-13,
        )
    rb, re, rs = _rates_at(alpha, 0.0, gamma, params.sigma_d2, phi)
    return RateDesign(phi, rb, re, rs, alpha, 0.0, gamma, phi_cap)


def design_curve(params: SystemParams, gains: np.ndarray) -> dict:
    """Vectorized closed-form design over an array of channel gains.

    Returns arrays phi, rb, re, rs (zero where the gain is infeasible) and
    the feasibility mask. Entries where the closed form degenerates fall back
    to the scalar path.
    """
    report = feasibility_report(params)
    if not report.feasible_bits:
        raise FeasibilityError(report.note, report=report)
    z = np.asarray(gains, dtype=np.float64)
    out = {
        "phi": np.zeros_like(z),
        "rb": np.zeros_like(z),
        "re": np.zeros_like(z),
        "rs": np.zeros_like(z),
        "feasible": z > report.mu_min,
    }
    ok = out["feasible"]
    if not np.any(ok):
        return out
    zf = z[ok]
    q = outage_error_quantile(params)
    gamma = eve_sir_factor(params.n, params.eps_so)
    sd2 = params.sigma_d2
    alpha = zf * params.p * (1.0 - q)
    beta = zf * params.p * q / (params.n - 1)
    phi_cap = 1.0 - report.mu_min / zf

    if gamma == 0.0:
        phi = np.ones_like(zf)
        rb = np.log2(1.0 + alpha / sd2) if sd2 > 0 else np.full_like(zf, np.inf)
        re = np.zeros_like(zf)
    elif sd2 == 0.0:
        phi = np.ones_like(zf)
        rb = np.full_like(zf, np.inf)
        re = np.full_like(zf, np.inf)
        out["rs"][ok] = np.log2(alpha / (beta * gamma))
        out["phi"][ok] = phi
        out["rb"][ok] = rb
        out["re"][ok] = re
        return out
    else:
        core = alpha - beta * gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            num = (beta + sd2) * core - np.sqrt(
                np.maximum(core + sd2 * (1.0 - gamma), 0.0)
            ) * np.sqrt(np.maximum(alpha * gamma * sd2 * (beta + sd2), 0.0))
            den = beta * core + alpha * sd2 * (1.0 - gamma)
            phi = num / den
        bad = ~np.isfinite(phi) | (phi <= 0.0) | (phi >= phi_cap)
        if np.any(bad):
            for i in np.nonzero(bad)[0]:
                a_i, b_i, cap_i = alpha[i], beta[i], phi_cap[i]
                phi[i] = _golden_max(
                    lambda x: _rates_at(a_i, b_i, gamma, sd2, x)[2], 0.0, cap_i, 1e-13
                )
        with np.errstate(divide="ignore"):
            rb = np.log2(1.0 + alpha * phi / (beta * (1.0 - phi) + sd2))
            re = np.log2(1.0 + gamma * phi / (1.0 - phi))

    rs = np.maximum(rb - re, 0.0)
    out["phi"][ok] = phi
    out["rb"][ok] = rb
    out["re"][ok] = re
    out["rs"][ok] = rs
    return out


def rs_star_curve(params: SystemParams, gains: np.ndarray) -> np.ndarray:
    """Maximum secret rate per gain; zero below the transmit threshold."""
    return design_curve(params, gains)["rs"]


def perfect_csi_rs_curve(params: SystemParams, gains: np.ndarray) -> np.ndarray:
    """Secret rate of the unquantized-feedback baseline per gain."""
    z = np.asarray(gains, dtype=np.float64)
    gamma = eve_sir_factor(params.n, params.eps_so)
    sd2 = params.sigma_d2
    rs = np.zeros_like(z)
    threshold = gamma * sd2 / params.p
    ok = z > max(threshold, 0.0)
    if not np.any(ok):
        return rs
    alpha = z[ok] * params.p

    if gamma == 0.0:
        rs[ok] = np.log2(1.0 + alpha / sd2) if sd2 > 0 else np.inf
        return rs
    if sd2 == 0.0:
        rs[ok] = np.inf
        return rs

    phi_cap = 1.0 - threshold / z[ok]
    with np.errstate(divide="ignore", invalid="ignore"):
        num = alpha - np.sqrt(alpha * gamma * (alpha + sd2 * (1.0 - gamma)))
        den = alpha * (1.0 - gamma)
        phi = num / den
    bad = ~np.isfinite(phi) | (phi <= 0.0) | (phi >= phi_cap)
    if np.any(bad):
        for i in np.nonzero(bad)[0]:
            a_i, cap_i = alpha[i], phi_cap[i]
            phi[i] = _golden_max(
                lambda x: _rates_at(a_i, 0.0, gamma, sd2, x)[2], 0.0, cap_i, 1e-13
            )
    rb = np.log2(1.0 + alpha * phi / sd2)
    re = np.log2(1.0 + gamma * phi / (1.0 - phi))
    rs[ok] = np.maximum(rb - re, 0.0)
    return rs
