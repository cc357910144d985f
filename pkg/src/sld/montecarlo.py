"""Brute-force empirical counterparts of every closed form.

Reproducibility contract: draws are partitioned into fixed-size blocks, each
block owns an rng derived from (seed, block index), and partial results are
reduced in block order. Estimates are therefore bit-identical for a given
SimConfig no matter how many workers execute the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import sample_directions, sample_rayleigh_block
from .codebook import (
    Codebook,
    generate_grassmannian,
    generate_rvq,
    quantize_directions,
    sample_qca_error,
)
from .design import design_closed_form, design_curve
from .errors import ParameterError
from .outage import feasibility_report, re_min
from .params import SystemParams
from .throughput import CgiQuantizer

_SOURCES = ("rvq", "grassmannian", "qca_synthetic")
# Spawn key reserved for codebook construction so block streams never collide.
_CODEBOOK_KEY = 0x5EED


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    draws: int = 100_000
    seed: int = 0
    codebook_source: str = "qca_synthetic"
    workers: int = 1
    block_size: int = 65536

    def __post_init__(self):
        if self.draws < 1000:
            raise ParameterError(f"draws must be >= 1000, got {self.draws!r}")
        if self.codebook_source not in _SOURCES:
            raise ParameterError(
                f"codebook_source must be one of {_SOURCES}, got {self.codebook_source!r}"
            )
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers!r}")
        if self.block_size < 1024:
            raise ParameterError(f"block_size must be >= 1024, got {self.block_size!r}")


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_err: float
    draws: int


@dataclass(frozen=True)
class ThroughputEstimate:
    """Realized throughput plus the bookkeeping needed to compare it with
    the analytic formulas.

    `value` accumulates the secret rate only on draws without a realized
    connection outage. `discounted_value` instead applies the definitional
    (1 - sigma_co) factor to every transmitting draw, which is the quantity
    the closed-form throughput expressions compute; with exact gain feedback
    the two coincide in expectation because the outage constraint is tight at
    every gain, while quantized feedback is strictly conservative inside
    each cell, making `value >= discounted_value` on average.
    """

    value: float
    std_err: float
    draws: int
    discounted_value: float
    discounted_std_err: float
    outage_rate_given_tx: float
    suspend_rate: float


_codebook_cache: dict = {}


def _codebook_for(cfg: SimConfig) -> Codebook:
    key = (cfg.codebook_source, cfg.params.n, cfg.params.b1, cfg.seed)
    cb = _codebook_cache.get(key)
    if cb is None:
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(_CODEBOOK_KEY,))
        )
        if cfg.codebook_source == "rvq":
            cb = generate_rvq(cfg.params.n, cfg.params.b1, rng)
        else:
            cb = generate_grassmannian(cfg.params.n, cfg.params.b1, rng)
        _codebook_cache[key] = cb
    return cb


def _block_sizes(cfg: SimConfig):
    full, rest = divmod(cfg.draws, cfg.block_size)
    sizes = [cfg.block_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def _block_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _map_blocks(cfg: SimConfig, fn):
    """Run fn(rng, count) over every block; results returned in block order."""
    sizes = _block_sizes(cfg)

    def run(index_size):
        index, size = index_size
        return fn(_block_rng(cfg.seed, index), size)

    tasks = list(enumerate(sizes))
    if cfg.workers == 1 or len(tasks) == 1:
        return [run(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(run, tasks))


def _draw_cos2(cfg: SimConfig, rng: np.random.Generator, count: int,
               cb: Codebook = None) -> np.ndarray:
    """Per-draw squared beam alignment, from a real codebook or the cap law."""
    if cfg.codebook_source == "qca_synthetic":
        return 1.0 - sample_qca_error(cfg.params.n, cfg.params.b1, rng, size=count)
    dirs = sample_directions(count, cfg.params.n, rng)
    return quantize_directions(dirs, cb)


def _sinr(params: SystemParams, gain2, cos2, phi):
    su2 = params.p * np.asarray(phi)
    sv2 = params.p * (1.0 - np.asarray(phi)) / (params.n - 1)
    return gain2 * cos2 * su2 / (gain2 * (1.0 - cos2) * sv2 + params.sigma_d2)


def _binomial(successes: int, draws: int) -> EstimateWithError:
    p = successes / draws
    return EstimateWithError(p, math.sqrt(p * (1.0 - p) / draws), draws)


def empirical_pco(cfg: SimConfig, rb: float, phi: float, gain2: float) -> EstimateWithError:
    """Connection outage frequency at fixed gain, over quantization outcomes."""
    if not 0.0 < phi < 1.0:
        raise ParameterError(f"phi must be in (0, 1), got {phi!r}")
    if not gain2 > 0:
        raise ParameterError(f"gain2 must be > 0, got {gain2!r}")
    if rb < 0:
        raise ParameterError(f"rb must be >= 0, got {rb!r}")
    cb = None if cfg.codebook_source == "qca_synthetic" else _codebook_for(cfg)

    def block(rng, count):
        cos2 = _draw_cos2(cfg, rng, count, cb)
        capacity = np.log2(1.0 + _sinr(cfg.params, gain2, cos2, phi))
        return int(np.count_nonzero(capacity <= rb))

    return _binomial(sum(_map_blocks(cfg, block)), cfg.draws)


def empirical_pso(cfg: SimConfig, re: float, phi: float) -> EstimateWithError:
    """Secrecy outage frequency over eavesdropper channel draws.

    The eavesdropper SIR law does not depend on the beam direction (the
    channel is isotropic), so the canonical frame is used; small-batch tests
    cross-check this against the per-vector SIR primitive.
    """
    if re < 0:
        raise ParameterError(f"re must be >= 0, got {re!r}")
    if not 0.0 < phi <= 1.0:
        raise ParameterError(f"phi must be in (0, 1], got {phi!r}")
    params = cfg.params
    su2 = params.p * phi
    sv2 = params.p * (1.0 - phi) / (params.n - 1)

    def block(rng, count):
        g = sample_rayleigh_block(count, params.n, params.sigma_g2, rng)
        signal = np.abs(g[:, 0]) ** 2 * su2
        interference = np.sum(np.abs(g[:, 1:]) ** 2, axis=1) * sv2
        with np.errstate(divide="ignore"):
            sir = np.where(interference > 0, signal / np.maximum(interference, 1e-300), np.inf)
        return int(np.count_nonzero(np.log2(1.0 + sir) >= re))

    return _binomial(sum(_map_blocks(cfg, block)), cfg.draws)


def empirical_rs_star(cfg: SimConfig, gain2: float, phi_grid, rb_tolerance: float = 1e-3,
                      return_std_err: bool = False):
    """Exact secret-rate oracle: invert the simulated connection outage.

    For each phi in the grid, binary-search the largest codeword rate whose
    empirical outage stays within sigma_co, subtract the required redundancy,
    and take the best phi. Quantization draws are shared across the grid.
    """
    params = cfg.params
    cb = None if cfg.codebook_source == "qca_synthetic" else _codebook_for(cfg)
    blocks = _map_blocks(cfg, lambda rng, count: _draw_cos2(cfg, rng, count, cb))
    cos2 = np.concatenate(blocks)
    sigma = params.sigma_co

    best_rs = 0.0
    best = None
    for phi in phi_grid:
        if not 0.0 < phi < 1.0:
            raise ParameterError(f"phi grid values must be in (0, 1), got {phi!r}")
        capacity = np.sort(np.log2(1.0 + _sinr(params, gain2, cos2, phi)))

        def pco(rate: float) -> float:
            return np.searchsorted(capacity, rate, side="right") / cfg.draws

        lo = 0.0
        hi = math.log2(1.0 + gain2 * params.p * phi / params.sigma_d2) + rb_tolerance \
            if params.sigma_d2 > 0 else float(capacity[-1]) + rb_tolerance
        while hi - lo > rb_tolerance:
            mid = 0.5 * (lo + hi)
            if pco(mid) <= sigma:
                lo = mid
            else:
                hi = mid
        rs = max(0.0, lo - re_min(params, phi))
        if rs > best_rs:
            best_rs = rs
            best = (phi, lo, capacity)

    if not return_std_err:
        return best_rs
    if best is None:
        return 0.0, 0.0
    _, rb_hat, capacity = best
    # Asymptotic quantile-estimator error: binomial noise over local density.
    window = max(10.0 * rb_tolerance, 1e-3)
    inside = np.searchsorted(capacity, rb_hat + window) - np.searchsorted(
        capacity, rb_hat - window
    )
    density = max(inside / (2.0 * window * cfg.draws), 1e-9)
    se = math.sqrt(sigma * (1.0 - sigma) / cfg.draws) / density
    return best_rs, se


def empirical_throughput(cfg: SimConfig, cgi_quantizer: CgiQuantizer = None) -> ThroughputEstimate:
    """End-to-end pipeline: sample the channel, quantize gain and direction,
    design from the feedback, then score the realized link."""
    params = cfg.params
    report = feasibility_report(params)
    cb = None if cfg.codebook_source == "qca_synthetic" else _codebook_for(cfg)

    if cgi_quantizer is not None:
        # Cell designs: index 0 suspends, cells use their representative gain.
        reps = cgi_quantizer.representatives
        rb_cell = np.zeros(len(reps) + 1)
        rs_cell = np.zeros(len(reps) + 1)
        phi_cell = np.full(len(reps) + 1, 0.5)
        for m, rep in enumerate(reps, start=1):
            d = design_closed_form(params, float(rep))
            rb_cell[m] = d.rb_star
            rs_cell[m] = d.rs_star
            phi_cell[m] = d.phi_star

    def block(rng, count):
        h = sample_rayleigh_block(count, params.n, 1.0, rng)
        z = np.sum(np.abs(h) ** 2, axis=1)
        if cfg.codebook_source == "qca_synthetic":
            cos2 = 1.0 - sample_qca_error(params.n, params.b1, rng, size=count)
        else:
            dirs = h / np.linalg.norm(h, axis=1, keepdims=True)
            cos2 = quantize_directions(dirs, cb)

        if cgi_quantizer is None:
            dsn = design_curve(params, z)
            tx = dsn["feasible"]
            rb, rs, phi = dsn["rb"], dsn["rs"], dsn["phi"]
        else:
            m = cgi_quantizer.quantize(z)
            tx = m > 0
            rb, rs, phi = rb_cell[m], rs_cell[m], phi_cell[m]

        capacity = np.log2(1.0 + _sinr(params, z, cos2, phi))
        with np.errstate(invalid="ignore"):
            outage = tx & (capacity <= rb)
        realized = np.where(tx & ~outage, rs, 0.0)
        discounted = np.where(tx, (1.0 - params.sigma_co) * rs, 0.0)
        return (
            float(realized.sum()),
            float((realized ** 2).sum()),
            float(discounted.sum()),
            float((discounted ** 2).sum()),
            int(np.count_nonzero(tx)),
            int(np.count_nonzero(outage)),
        )

    totals = [sum(col) for col in zip(*_map_blocks(cfg, block))]
    s1, s2, d1, d2, n_tx, n_out = totals
    n = cfg.draws
    mean = s1 / n
    dmean = d1 / n

    def se(total, total_sq, mu):
        var = max(total_sq / n - mu * mu, 0.0)
        return math.sqrt(var / n)

    return ThroughputEstimate(
        value=mean,
        std_err=se(s1, s2, mean),
        draws=n,
        discounted_value=dmean,
        discounted_std_err=se(d1, d2, dmean),
        outage_rate_given_tx=n_out / n_tx if n_tx else 0.0,
        suspend_rate=1.0 - n_tx / n,
    )


def empirical_secrecy_capacity_bound(cfg: SimConfig, gain2: float) -> EstimateWithError:
    """Frequency of the secrecy capacity falling below the designed rate.

    The design pins both outage probabilities, so by the union bound this
    frequency cannot exceed sigma_co + eps_so.
    """
    params = cfg.params
    dsn = design_closed_form(params, gain2)
    if not dsn.rs_star > 0:
        raise ParameterError("design has zero secret rate; bound is vacuous")
    cb = None if cfg.codebook_source == "qca_synthetic" else _codebook_for(cfg)
    su2 = params.p * dsn.phi_star
    sv2 = params.p * (1.0 - dsn.phi_star) / (params.n - 1)

    def block(rng, count):
        cos2 = _draw_cos2(cfg, rng, count, cb)
        g = sample_rayleigh_block(count, params.n, params.sigma_g2, rng)
        cap_d = np.log2(1.0 + _sinr(params, gain2, cos2, dsn.phi_star))
        signal = np.abs(g[:, 0]) ** 2 * su2
        interference = np.sum(np.abs(g[:, 1:]) ** 2, axis=1) * sv2
        with np.errstate(divide="ignore"):
            sir = np.where(interference > 0, signal / np.maximum(interference, 1e-300), np.inf)
        cap_e = np.log2(1.0 + sir)
        cs = np.maximum(cap_d - cap_e, 0.0)
        return int(np.count_nonzero(cs < dsn.rs_star))

    return _binomial(sum(_map_blocks(cfg, block)), cfg.draws)
