"""Closed-form connection/secrecy outage probabilities and feasibility limits.

Connection outage: the desired channel cannot support the codeword rate rb.
Under the spherical-cap error law the probability has three branches split at
the rates r1 (capacity under worst-case quantization error, never in outage)
and r2 (capacity under perfect beam alignment, always in outage above it).

Secrecy outage: the eavesdropper channel supports more than the redundancy
rate re. Its probability is exact, codebook-independent, and scale-free in
the eavesdropper channel variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codebook import qca_error_quantile, qca_max_error
from .errors import FeasibilityError, ParameterError
from .params import SystemParams


def eve_sir_factor(n: int, eps_so: float) -> float:
    """gamma = (n-1) * (eps^(-1/(n-1)) - 1).

    gamma * phi / (1 - phi) is the SIR the eavesdropper exceeds with
    probability exactly eps, so it sets the minimum rate redundancy.
    """
    if not 0.0 < eps_so <= 1.0:
        raise ParameterError(f"eps_so must be in (0, 1], got {eps_so!r}")
    return (n - 1) * (eps_so ** (-1.0 / (n - 1)) - 1.0)


def outage_error_quantile(params: SystemParams) -> float:
    """(1 - sigma_co)-quantile of the cap-model quantization error.

    This is the worst error the transmitter must survive when it may ignore
    the worst sigma_co fraction of quantization outcomes.
    """
    return float(qca_error_quantile(params.n, params.b1, 1.0 - params.sigma_co))


def _check_phi_interior(phi: float) -> None:
    if not 0.0 < phi < 1.0:
        raise ParameterError(f"phi must be in (0, 1), got {phi!r}")


def r1_rate(params: SystemParams, phi: float, gain2: float) -> float:
    """Capacity at the maximum quantization error: below it outage is impossible."""
    _check_phi_interior(phi)
    e_max = qca_max_error(params.n, params.b1)
    num = gain2 * params.p * phi * (1.0 - e_max)
    den = gain2 * params.p * (1.0 - phi) / (params.n - 1) * e_max + params.sigma_d2
    return math.log2(1.0 + num / den)


def r2_rate(params: SystemParams, phi: float, gain2: float) -> float:
    """Capacity at perfect alignment: above it outage is certain."""
    if params.sigma_d2 == 0.0:
        return math.inf
    return math.log2(1.0 + gain2 * params.p * phi / params.sigma_d2)


def pco_qca(params: SystemParams, rb: float, phi: float, gain2: float) -> float:
    """Connection outage probability at codeword rate rb (cap-model law)."""
    _check_phi_interior(phi)
    if rb < 0:
        raise ParameterError(f"rb must be >= 0, got {rb!r}")
    if not gain2 > 0:
        raise ParameterError(f"gain2 must be > 0, got {gain2!r}")
    if rb <= r1_rate(params, phi, gain2):
        return 0.0
    if rb > r2_rate(params, phi, gain2):
        return 1.0
    t = 2.0 ** rb - 1.0
    num = gain2 * params.p * phi - params.sigma_d2 * t
    den = gain2 * (params.p * phi + params.p * (1.0 - phi) / (params.n - 1) * t)
    value = 1.0 - 2.0 ** params.b1 * (num / den) ** (params.n - 1)
    return min(1.0, max(0.0, value))


def pso(params: SystemParams, re: float, phi: float) -> float:
    """Secrecy outage probability at redundancy rate re. Exact.

    Independent of the codebook, the desired channel, and the eavesdropper
    channel variance.
    """
    if re < 0:
        raise ParameterError(f"re must be >= 0, got {re!r}")
    if not 0.0 < phi <= 1.0:
        raise ParameterError(f"phi must be in (0, 1], got {phi!r}")
    if phi == 1.0:
        return 1.0
    t = 2.0 ** re - 1.0
    return (1.0 + t * (1.0 / phi - 1.0) / (params.n - 1)) ** (1 - params.n)


def rb_max(params: SystemParams, phi: float, gain2: float) -> float:
    """Largest codeword rate whose connection outage stays within sigma_co.

    Continuously covers the endpoints: equals r1 at sigma_co = 0 and r2 at
    sigma_co = 1 (the error quantile hits the cap maximum and zero there).
    """
    if not 0.0 < phi <= 1.0:
        raise ParameterError(f"phi must be in (0, 1], got {phi!r}")
    if not gain2 > 0:
        raise ParameterError(f"gain2 must be > 0, got {gain2!r}")
    q = outage_error_quantile(params)
    num = gain2 * params.p * phi * (1.0 - q)
    den = gain2 * params.p * (1.0 - phi) / (params.n - 1) * q + params.sigma_d2
    if den == 0.0:
        return math.inf
    return math.log2(1.0 + num / den)


def re_min(params: SystemParams, phi: float) -> float:
    """Smallest redundancy whose secrecy outage stays within eps_so."""
    if not 0.0 < phi <= 1.0:
        raise ParameterError(f"phi must be in (0, 1], got {phi!r}")
    gamma = eve_sir_factor(params.n, params.eps_so)
    if gamma == 0.0:
        return 0.0
    if phi == 1.0:
        return math.inf
    return math.log2(1.0 + gamma * phi / (1.0 - phi))


def b1_min(sigma_co: float, eps_so: float) -> int:
    """Fewest CDI feedback bits admitting a positive secret rate.

    Strict ceiling of log2((1 - sigma_co)/eps_so): the smallest positive
    integer strictly larger than the log; never below 1.
    """
    if not 0.0 <= sigma_co <= 1.0:
        raise ParameterError(f"sigma_co must be in [0, 1], got {sigma_co!r}")
    if eps_so == 0.0:
        raise FeasibilityError(
            "eps_so = 0 requires unbounded feedback: no finite b1 suffices"
        )
    if not 0.0 < eps_so <= 1.0:
        raise ParameterError(f"eps_so must be in (0, 1], got {eps_so!r}")
    ratio = (1.0 - sigma_co) / eps_so
    if ratio <= 0.0:
        return 1
    return max(1, math.floor(math.log2(ratio)) + 1)


def mu_min(params: SystemParams) -> float:
    """Transmit threshold: minimum ||h||^2 admitting a positive secret rate."""
    need = b1_min(params.sigma_co, params.eps_so)
    if params.b1 < need:
        raise FeasibilityError(
            f"b1={params.b1} is below the minimum {need} for "
            f"sigma_co={params.sigma_co}, eps_so={params.eps_so}",
            report=feasibility_report(params),
        )
    if params.sigma_d2 == 0.0:
        return 0.0
    gamma = eve_sir_factor(params.n, params.eps_so)
    ratio = (1.0 - params.sigma_co) / (2.0 ** params.b1 * params.eps_so)
    den = params.p * (1.0 - ratio ** (1.0 / (params.n - 1)))
    if den <= 0.0:
        return math.inf
    return gamma * params.sigma_d2 / den


@dataclass(frozen=True)
class FeasibilityReport:
    """Why (or whether) a positive secret rate is reachable."""

    b1_min: int
    mu_min: float
    feasible_bits: bool
    note: str


def feasibility_report(params: SystemParams) -> FeasibilityReport:
    need = b1_min(params.sigma_co, params.eps_so)
    feasible = params.b1 >= need
    if not feasible:
        return FeasibilityReport(
            b1_min=need,
            mu_min=math.inf,
            feasible_bits=False,
            note=f"b1={params.b1} < b1_min={need}: no channel strength suffices",
        )
    threshold = mu_min(params)
    return FeasibilityReport(
        b1_min=need,
        mu_min=threshold,
        feasible_bits=True,
        note=f"positive secret rate requires ||h||^2 > {threshold:.6g}",
    )
