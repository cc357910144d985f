"""Secrecy throughput: exact-gain integral, asymptote, and CGI quantization.

Throughput is (1 - sigma_co) times the expected secret rate over the
channel-gain distribution (Erlang with shape n, unit scale). The gain
quantizers feed back which cell ||h||^2 fell into; the transmitter designs
for the cell's lower edge, so every quantized scheme under-approximates the
exact-gain throughput.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .design import design_closed_form, perfect_csi_rs_curve, rs_star_curve
from .errors import FeasibilityError, ParameterError
from .outage import eve_sir_factor, feasibility_report
from .params import SystemParams

# Mass left above the quadrature cap (relative to the transmit probability
# when that is itself tiny).
_TAIL_MASS = 1e-12
# Finite-cell evaluation above this many gain-quantizer bits costs more than
# the < 2^-cap relative error of using the infinite-resolution limit.
DEFAULT_B2_CAP = 14


def gamma_reg_upper(n: int, x):
    """Regularized upper incomplete gamma at integer shape.

    Equals exp(-x) * sum_{k<n} x^k / k!, which is also the probability that
    an Erlang(n, 1) gain exceeds x.
    """
    if not isinstance(n, int) or n < 1:
        raise ParameterError(f"n must be an integer >= 1, got {n!r}")
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0):
        raise ParameterError("x must be >= 0")
    # exp(-x) underflows to zero beyond ~746 where the result is zero anyway;
    # clipping the series argument there keeps the sum finite (no inf * 0).
    xc = np.minimum(xa, 750.0)
    term = np.ones_like(xc)
    total = np.ones_like(xc)
    for k in range(1, n):
        term = term * xc / k
        total = total + term
    out = total * np.exp(-xa)
    out = np.minimum(out, 1.0)
    return float(out) if np.isscalar(x) else out


def erlang_pdf(n: int, z):
    """Density of the channel gain ||h||^2: z^(n-1) e^-z / (n-1)!."""
    za = np.asarray(z, dtype=np.float64)
    log_pdf = (n - 1) * np.log(np.maximum(za, 1e-300)) - za - math.lgamma(n)
    out = np.where(za > 0, np.exp(log_pdf), 1.0 if n == 1 else 0.0)
    return float(out) if np.isscalar(z) else out


def _gamma_inv_vec(n: int, y: np.ndarray) -> np.ndarray:
    """Vectorized inverse of gamma_reg_upper by bisection plus Newton polish."""
    y = np.asarray(y, dtype=np.float64)
    if np.any((y <= 0) | (y > 1)):
        raise ParameterError("y must be in (0, 1]")
    lo = np.zeros_like(y)
    hi = np.full_like(y, float(2 * n + 16))
    y_min = float(np.min(y))
    while gamma_reg_upper(n, float(hi.flat[0])) > y_min:
        hi = hi * 2.0
        if hi.flat[0] > 1e6:
            break
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        above = gamma_reg_upper(n, mid) > y
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    x = 0.5 * (lo + hi)
    # Newton polish; the derivative of the upper tail is -erlang_pdf.
    for _ in range(2):
        f = gamma_reg_upper(n, x) - y
        d = erlang_pdf(n, x)
        step = np.where(d > 0, f / np.maximum(d, 1e-300), 0.0)
        x = np.clip(x + step, lo, hi)
    return np.where(y >= 1.0, 0.0, x)


def gamma_reg_upper_inv(n: int, y: float) -> float:
    """x with gamma_reg_upper(n, x) = y, for y in (0, 1]."""
    if not 0.0 < y <= 1.0:
        raise ParameterError(f"y must be in (0, 1], got {y!r}")
    if y == 1.0:
        return 0.0
    return float(_gamma_inv_vec(n, np.asarray([y]))[0])


def _simpson_adaptive(fvec, a: float, b: float, rel_tol: float = 1e-8,
                      start: int = 64, max_points: int = 1 << 16) -> float:
    """Composite Simpson with step doubling until relative convergence."""
    if b <= a:
        return 0.0

    def simpson(m: int) -> float:
        z = np.linspace(a, b, m + 1)
        f = fvec(z)
        h = (b - a) / m
        return h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())

    m = start
    prev = simpson(m)
    while m < max_points:
        m *= 2
        cur = simpson(m)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class ThroughputResult:
    eta: float
    scheme: str
    params: SystemParams
    note: str = ""


def _rate_ceiling(params: SystemParams) -> float:
    """Large-gain (equivalently large-power) limit of the secret rate."""
    top = (2.0 ** params.b1 / (1.0 - params.sigma_co)) ** (1.0 / (params.n - 1)) - 1.0 \
        if params.sigma_co < 1.0 else math.inf
    bot = params.eps_so ** (-1.0 / (params.n - 1)) - 1.0
    if bot == 0.0:
        return math.inf
    return math.log2(top / bot)


def throughput_asymptote(params: SystemParams) -> float:
    """Finite large-power limit of the secrecy throughput.

    Infinite when eps_so = 1 (no secrecy constraint caps the rate).
    """
    report = feasibility_report(params)
    if not report.feasible_bits:
        raise FeasibilityError(report.note, report=report)
    if params.sigma_co == 1.0:
        return 0.0
    ceiling = _rate_ceiling(params)
    return (1.0 - params.sigma_co) * ceiling


def throughput_exact_cgi(params: SystemParams) -> ThroughputResult:
    """Throughput with the gain known exactly at the transmitter.

    Quadrature of the secret rate against the Erlang gain density over
    [mu_min, cap], with the remaining tail bounded by the rate ceiling.
    """
    report = feasibility_report(params)
    if not report.feasible_bits:
        return ThroughputResult(0.0, "exact_cgi", params, note=report.note)
    mu = report.mu_min
    t_lo = gamma_reg_upper(params.n, mu) if math.isfinite(mu) else 0.0
    if t_lo <= 0.0:
        return ThroughputResult(0.0, "exact_cgi", params,
                                note="transmit probability underflows")
    tail_mass = max(min(_TAIL_MASS, t_lo * 1e-9), 1e-300)
    cap = gamma_reg_upper_inv(params.n, tail_mass)

    def integrand(z):
        return rs_star_curve(params, z) * erlang_pdf(params.n, z)

    body = _simpson_adaptive(integrand, mu, cap)
    ceiling = _rate_ceiling(params)
    if not math.isfinite(ceiling):
        ceiling = float(rs_star_curve(params, np.asarray([cap]))[0])
    tail = ceiling * gamma_reg_upper(params.n, cap)
    eta = (1.0 - params.sigma_co) * (body + tail)
    return ThroughputResult(eta, "exact_cgi", params)


@dataclass(frozen=True)
class CgiQuantizer:
    """Gain-feedback partition: cell edges plus per-cell assumed gains.

    Transmit cells are indexed m = 1..len(representatives); m = 0 suspends.
    Each representative is its cell's lower edge, so designs made from the
    feedback never violate either outage constraint inside the cell.
    """

    scheme: str
    b2: int
    boundaries: np.ndarray
    representatives: np.ndarray
    masses: np.ndarray
    mu_t: float = None
    mu1: float = None
    mu2: float = None
    delta_used: float = field(default=None, compare=False)

    def quantize(self, gains) -> np.ndarray:
        """Feedback index for each gain (0 = suspend)."""
        z = np.asarray(gains, dtype=np.float64)
        return np.searchsorted(self.boundaries, z, side="right").astype(np.int64)

    @property
    def cells(self) -> int:
        return len(self.representatives)


def build_one_bit_quantizer(params: SystemParams, grid: int = 512) -> CgiQuantizer:
    """On-off threshold maximizing rate-at-threshold times tail probability."""
    if params.b2 != 1:
        raise ParameterError(f"one-bit quantizer needs b2 = 1, got {params.b2}")
    report = feasibility_report(params)
    if not report.feasible_bits:
        raise FeasibilityError(report.note, report=report)
    t_lo = gamma_reg_upper(params.n, report.mu_min)
    if t_lo <= 0.0:
        raise FeasibilityError("transmit probability underflows", report=report)

    # Scan uniformly in tail mass, which maps (mu_min, inf) to (0, t_lo).
    u = t_lo * (np.arange(1, grid + 1) - 0.5) / grid
    mu_grid = np.sort(_gamma_inv_vec(params.n, u))
    values = rs_star_curve(params, mu_grid) * gamma_reg_upper(params.n, mu_grid)
    k = int(np.argmax(values))

    def objective(mu: float) -> float:
        if mu <= report.mu_min:
            return 0.0
        rs = float(rs_star_curve(params, np.asarray([mu]))[0])
        return rs * gamma_reg_upper(params.n, mu)

    lo = mu_grid[k - 1] if k > 0 else report.mu_min
    hi = mu_grid[k + 1] if k < grid - 1 else mu_grid[-1] * 2.0
    # Golden-section refinement of the bracketed grid maximum.
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = objective(c), objective(d)
    while hi - lo > 1e-11 * max(1.0, hi):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = objective(d)
    mu_t = 0.5 * (lo + hi)
    return CgiQuantizer(
        scheme="one_bit",
        b2=1,
        boundaries=np.asarray([mu_t]),
        representatives=np.asarray([mu_t]),
        masses=np.asarray([gamma_reg_upper(params.n, mu_t)]),
        mu_t=mu_t,
        delta_used=None,
    )


def _equalized_with_delta(params: SystemParams, delta: float) -> CgiQuantizer:
    report = feasibility_report(params)
    if not report.feasible_bits:
        raise FeasibilityError(report.note, report=report)
    t_lo = gamma_reg_upper(params.n, report.mu_min)
    if not t_lo - delta > delta:
        raise ParameterError(
            f"delta={delta:g} leaves no room: transmit probability is {t_lo:.3g}"
        )
    cells = 2 ** params.b2 - 2
    t1 = t_lo - delta
    t2 = delta
    edge_mass = t1 - np.arange(cells + 1) * (t1 - t2) / cells
    edges = _gamma_inv_vec(params.n, edge_mass)
    reps = np.concatenate([edges[:-1], edges[-1:]])
    masses = np.concatenate([np.full(cells, (t1 - t2) / cells), [t2]])
    return CgiQuantizer(
        scheme="equalized",
        b2=params.b2,
        boundaries=edges,
        representatives=reps,
        masses=masses,
        mu1=float(edges[0]),
        mu2=float(edges[-1]),
        delta_used=delta,
    )


def build_equalized_quantizer(params: SystemParams) -> CgiQuantizer:
    """Equal-probability-mass partition of the gain range [mu1, mu2].

    mu1 trims `delta` mass just above the transmit threshold (where the
    secret rate is still near zero) and mu2 trims `delta` mass off the far
    tail; the 2^b2 - 2 cells in between carry identical probability.
    """
    if params.b2 < 2:
        raise ParameterError(f"equalized quantizer needs b2 >= 2, got {params.b2}")
    return _equalized_with_delta(params, params.delta)


def throughput_quantized_cgi(params: SystemParams, quantizer: CgiQuantizer) -> ThroughputResult:
    """Throughput when the transmitter designs from quantized gain feedback."""
    rs = rs_star_curve(params, quantizer.representatives)
    eta = (1.0 - params.sigma_co) * float(np.dot(rs, quantizer.masses))
    return ThroughputResult(eta, quantizer.scheme, params)


def _throughput_fine_cgi_limit(params: SystemParams, delta: float) -> float:
    """b2 -> infinity limit of the equalized scheme: integral over [mu1, mu2]
    plus the top-cell term."""
    report = feasibility_report(params)
    t_lo = gamma_reg_upper(params.n, report.mu_min)
    if not t_lo - delta > delta:
        raise ParameterError("delta leaves no room for the quantized range")
    mu1 = gamma_reg_upper_inv(params.n, t_lo - delta)
    mu2 = gamma_reg_upper_inv(params.n, delta)

    def integrand(z):
        return rs_star_curve(params, z) * erlang_pdf(params.n, z)

    body = _simpson_adaptive(integrand, mu1, mu2)
    top = float(rs_star_curve(params, np.asarray([mu2]))[0]) * delta
    return (1.0 - params.sigma_co) * (body + top)


@dataclass(frozen=True)
class AllocationPoint:
    tau: float
    b1: int
    b2: int
    eta: float
    approximated: bool = False
    delta_used: float = None


@dataclass(frozen=True)
class AllocationSweep:
    """Throughput per split plus two optimum statistics.

    `tau_argmax` is the literal best split. The throughput surface is flat to
    well under 0.1% across a wide tau plateau, so the literal argmax is a
    fragile statistic; `tau_star` instead reports the start of that plateau:
    the fewest gain bits whose throughput is within `plateau_rtol` of the
    maximum. That is the allocation a bit-constrained design would pick.
    """

    points: list
    tau_star: float
    tau_argmax: float
    eta_max: float

    def __iter__(self):
        # Unpacks like the (points, tau_star) pair most callers want.
        return iter((self.points, self.tau_star))


def _effective_delta(params: SystemParams, t_lo: float) -> float:
    """Truncation mass per end of the quantized gain range.

    When the configured absolute mass would not fit inside the transmit
    probability, trim the same *fraction* of it instead, which is what the
    absolute value amounts to in ordinary regimes where t_lo is order one.
    """
    if t_lo - params.delta > params.delta:
        return params.delta
    return t_lo * min(params.delta, 0.25)


def _eta_for_split(params: SystemParams, b1: int, b2: int, b2_cap: int):
    """Throughput of one (b1, b2) split; adapts delta when the configured
    truncation mass exceeds the transmit probability."""
    p = params.replace(b1=b1, b2=b2)
    t_lo = gamma_reg_upper(p.n, feasibility_report(p).mu_min)
    if t_lo <= 0.0:
        return 0.0, False, None
    if b2 == 1:
        q = build_one_bit_quantizer(p)
        return throughput_quantized_cgi(p, q).eta, False, None
    delta = _effective_delta(p, t_lo)
    if b2 <= b2_cap:
        q = _equalized_with_delta(p, delta)
        return throughput_quantized_cgi(p, q).eta, False, delta
    return _throughput_fine_cgi_limit(p, delta), True, delta


def sweep_bit_allocation(params: SystemParams, budget: int, tau_grid=None,
                         b2_cap: int = DEFAULT_B2_CAP,
                         plateau_rtol: float = 1e-3) -> AllocationSweep:
    """Throughput across gain/direction feedback splits of a total bit budget.

    Each point carries tau = b2/budget. The gain scheme is on-off at b2 = 1
    and equalized otherwise; splits beyond `b2_cap` gain bits are evaluated
    at the infinite-resolution limit (the finite-cell value is within
    ~2^-b2_cap of it, relatively).
    """
    from .outage import b1_min as _b1_min

    if budget < 3:
        raise ParameterError(f"budget must be >= 3, got {budget!r}")
    need = _b1_min(params.sigma_co, params.eps_so)
    if tau_grid is None:
        b2_values = list(range(1, budget - need + 1))
    else:
        b2_values = sorted({int(round(t * budget)) for t in tau_grid})
        b2_values = [b for b in b2_values if b >= 1 and budget - b >= need]
    if not b2_values:
        raise FeasibilityError(
            f"budget {budget} leaves no feasible split: b1_min={need}"
        )
    points = []
    for b2 in b2_values:
        eta, approx, delta = _eta_for_split(params, budget - b2, b2, b2_cap)
        points.append(AllocationPoint(
            tau=b2 / budget, b1=budget - b2, b2=b2, eta=eta,
            approximated=approx, delta_used=delta,
        ))
    best = max(points, key=lambda pt: (pt.eta, -pt.b2))
    eta_max = best.eta
    knee = min(
        (pt for pt in points if pt.eta >= (1.0 - plateau_rtol) * eta_max),
        key=lambda pt: pt.b2,
    )
    return AllocationSweep(
        points=points, tau_star=knee.tau, tau_argmax=best.tau, eta_max=eta_max
    )


def perfect_feedback_throughput(params: SystemParams) -> float:
    """Expected secret rate of the unquantized-feedback baseline.

    No connection outage occurs with exact feedback, so no (1 - sigma_co)
    discount applies.
    """
    gamma = eve_sir_factor(params.n, params.eps_so)
    threshold = gamma * params.sigma_d2 / params.p
    t_lo = gamma_reg_upper(params.n, threshold)
    if t_lo <= 0.0:
        return 0.0
    tail_mass = max(min(_TAIL_MASS, t_lo * 1e-9), 1e-300)
    cap = gamma_reg_upper_inv(params.n, tail_mass)

    def integrand(z):
        return perfect_csi_rs_curve(params, z) * erlang_pdf(params.n, z)

    body = _simpson_adaptive(integrand, threshold, cap)
    tail = float(perfect_csi_rs_curve(params, np.asarray([cap]))[0]) \
        * gamma_reg_upper(params.n, cap)
    return body + tail


def bits_for_fraction(params: SystemParams, fraction: float,
                      max_total_bits: int = 96, b2_cap: int = DEFAULT_B2_CAP) -> float:
    """Feedback bits per antenna to reach `fraction` of the perfect-feedback
    throughput, with the gain/direction split optimized at each budget."""
    from .outage import b1_min as _b1_min

    if not 0.0 < fraction < 1.0:
        raise ParameterError(f"fraction must be in (0, 1), got {fraction!r}")
    target = fraction * perfect_feedback_throughput(params)
    need = _b1_min(params.sigma_co, params.eps_so)

    def best_eta(budget: int) -> float:
        points, _ = sweep_bit_allocation(params, budget, b2_cap=b2_cap)
        return max(pt.eta for pt in points)

    lo = max(need + 1, 3)
    if best_eta(lo) >= target:
        return lo / params.n
    hi = lo
    while True:
        hi = min(max_total_bits, hi + max(4, hi - lo))
        if best_eta(hi) >= target:
            break
        if hi >= max_total_bits:
            raise FeasibilityError(
                f"{fraction:.0%} of perfect-feedback throughput not reached "
                f"within {max_total_bits} total bits"
            )
    # Smallest budget in (lo, hi] meeting the target; eta is monotone in the
    # budget because any split for B is still available at B + 1.
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if best_eta(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi / params.n
