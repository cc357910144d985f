"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see every line. Bands and
draw counts are pinned as stated; where a band is structurally out of reach
of the implemented formulas the test still asserts it (see notes on 4, 5, 7
and 9) so the failure is visible rather than papered over.
"""

import math
import time

import numpy as np
import pytest

from sld.design import (
    design_closed_form,
    design_numeric,
    design_perfect_csi,
    rs_star_curve,
)
from sld.montecarlo import (
    SimConfig,
    empirical_pso,
    empirical_rs_star,
    empirical_secrecy_capacity_bound,
)
from sld.outage import b1_min, mu_min, pso
from sld.params import SystemParams
from sld.throughput import (
    bits_for_fraction,
    build_equalized_quantizer,
    sweep_bit_allocation,
    throughput_exact_cgi,
    throughput_quantized_cgi,
)


def _report(number, name, ok, detail, started, budget):
    elapsed = time.time() - started
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {number:>2} {name}: {status} ({elapsed:.1f}s/{budget:.0f}s) {detail}")
    assert elapsed < budget, f"runtime budget exceeded: {elapsed:.1f}s >= {budget}s"
    assert ok, f"criterion {number} ({name}): {detail}"


def test_c01_table1_reproduction():
    t0 = time.time()
    expected = {
        (1.0, 1.0): 1, (1.0, 0.1): 1, (1.0, 0.01): 1, (1.0, 0.001): 1,
        (0.1, 1.0): 1, (0.1, 0.1): 4, (0.1, 0.01): 7, (0.1, 0.001): 10,
        (0.01, 1.0): 1, (0.01, 0.1): 4, (0.01, 0.01): 7, (0.01, 0.001): 10,
    }
    got = {key: b1_min(*key) for key in expected}
    bad = {k: (got[k], expected[k]) for k in expected if got[k] != expected[k]}
    _report(1, "table1", not bad, f"12 cells, mismatches: {bad or 'none'}", t0, 1.0)


def test_c02_closed_form_vs_oracle():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    worst_rs = worst_phi = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        sigma = float(rng.uniform(0.01, 0.95))
        eps = float(rng.uniform(0.005, 0.9))
        need = b1_min(sigma, eps)
        bits = int(rng.integers(need, 21)) if need < 21 else need
        p = float(10 ** rng.uniform(-1, 4))
        params = SystemParams(n=n, p=p, sigma_d2=1.0, sigma_co=sigma,
                              eps_so=eps, b1=bits)
        gain2 = mu_min(params) * float(1.0 + 10 ** rng.uniform(-2, 1.5)) + 1e-9
        closed = design_closed_form(params, gain2)
        numeric = design_numeric(params, gain2, tolerance=1e-8)
        worst_rs = max(worst_rs, abs(closed.rs_star - numeric.rs_star))
        worst_phi = max(worst_phi, abs(closed.phi_star - numeric.phi_star))
    ok = worst_rs < 1e-6 and worst_phi < 1e-5
    _report(2, "closed-form-vs-oracle", ok,
            f"1000 draws, worst |d rs| {worst_rs:.2e} (<1e-6), "
            f"worst |d phi| {worst_phi:.2e} (<1e-5)", t0, 60.0)


def test_c03_secrecy_outage_exactness():
    t0 = time.time()
    rng = np.random.default_rng(8)
    worst = 0.0
    for k in range(20):
        n = int(rng.integers(2, 9))
        re = float(rng.uniform(0.1, 3.0))
        phi = float(rng.uniform(0.05, 0.95))
        params = SystemParams(n=n, p=10.0, sigma_g2=float(rng.choice([0.1, 1.0, 10.0])))
        cfg = SimConfig(params=params, draws=10 ** 6, seed=1000 + k, workers=4)
        est = empirical_pso(cfg, re, phi)
        exact = pso(params, re, phi)
        null_se = math.sqrt(max(exact * (1.0 - exact), 1e-300) / cfg.draws)
        worst = max(worst, abs(est.value - exact) / null_se)
    counts = []
    base = SystemParams(n=4, p=10.0)
    for i, sg2 in enumerate((0.1, 1.0, 10.0)):
        cfg = SimConfig(params=base.replace(sigma_g2=sg2), draws=10 ** 6,
                        seed=77 + i, workers=4)
        counts.append(empirical_pso(cfg, 1.0, 0.4).value)
    pbar = sum(counts) / 3
    chi2 = sum((c - pbar) ** 2 / (pbar * (1 - pbar) / 10 ** 6) for c in counts)
    ok = worst <= 3.0 and chi2 < 5.991
    _report(3, "secrecy-outage-exactness", ok,
            f"20 triples at 1e6 draws, worst {worst:.2f} binomial se (<=3); "
            f"sigma_g2 homogeneity chi2 {chi2:.2f} (<5.991)", t0, 120.0)


def test_c04_qca_fidelity_fig1():
    t0 = time.time()
    phi_grid = np.linspace(0.03, 0.97, 33)
    gaps = {}
    for sigma in (0.01, 0.1):
        worst = 0.0
        for p_val in np.logspace(-1, 2, 13):
            params = SystemParams(n=2, p=float(p_val), sigma_d2=1.0,
                                  sigma_co=sigma, eps_so=0.05, b1=6)
            cfg = SimConfig(params=params, draws=10 ** 5, seed=42,
                            codebook_source="grassmannian", workers=4)
            rs_emp = empirical_rs_star(cfg, 4.0, phi_grid)
            rs_closed = float(rs_star_curve(params, np.asarray([4.0]))[0])
            worst = max(worst, abs(rs_emp - rs_closed))
        gaps[sigma] = worst
    ok = all(g <= 0.1 for g in gaps.values())
    # Known structural red at sigma=0.01: covering 99% of the sphere with 64
    # caps needs >= ~1.11x the cap-law radius, which alone costs >0.1 bits at
    # the top of the power range (see decisions ledger).
    _report(4, "qca-fidelity-fig1", ok,
            f"worst |rs gap| bits: sigma=0.01 -> {gaps[0.01]:.3f}, "
            f"sigma=0.1 -> {gaps[0.1]:.3f} (band 0.1)", t0, 600.0)


def test_c05_monotonicity_suite():
    t0 = time.time()
    problems = []
    # (a) phi* strictly decreasing in b1 over {b1_min..30} (fig2 experiment config).
    for sigma in (0.05, 0.1, 0.2):
        start = b1_min(sigma, 0.01)
        values = []
        for bits in range(start, 31):
            params = SystemParams(n=4, p=100.0, sigma_d2=1.0, sigma_co=sigma,
                                  eps_so=0.01, b1=bits)
            values.append((bits, design_closed_form(params, 4.0).phi_star))
        rising = [(a[0], b[0]) for a, b in zip(values, values[1:]) if b[1] >= a[1]]
        if rising:
            problems.append(f"sigma={sigma}: phi* not decreasing at b1 steps {rising}")
    # (b) phi* strictly increasing in P, approaching 1 (fig3 experiment config, over
    # the feasible power range; gain2=4 is infeasible below P ~ 4.9).
    phis = []
    for p_val in np.logspace(math.log10(5.0), 4, 25):
        params = SystemParams(n=4, p=float(p_val), sigma_d2=1.0, sigma_co=0.1,
                              eps_so=0.01, b1=10)
        phis.append(design_closed_form(params, 4.0).phi_star)
    if not all(b > a for a, b in zip(phis, phis[1:])):
        problems.append("phi* not strictly increasing in P")
    params = SystemParams(n=4, p=1e10, sigma_d2=1.0, sigma_co=0.1, eps_so=0.01, b1=10)
    if not design_closed_form(params, 4.0).phi_star > 0.999:
        problems.append("phi* does not approach 1 at large P")
    # (c) b1 = 40 agrees with the perfect-feedback baseline within 1e-3.
    # Pinned at n=2 (its defining example): the residual error quantile
    # decays as 2^(-b1/(n-1)), so 40 bits is converged only at n=2.
    params = SystemParams(n=2, p=100.0, sigma_d2=1.0, sigma_co=0.1, eps_so=0.01, b1=40)
    limited = design_closed_form(params, 4.0)
    perfect = design_perfect_csi(params, 4.0)
    if abs(limited.phi_star - perfect.phi_star) >= 1e-3 or \
            abs(limited.rs_star - perfect.rs_star) >= 1e-3:
        problems.append("b1=40 design does not match the perfect-feedback baseline")
    # Known structural red in (a): phi*(b1) rises between b1_min and ~10
    # while the gain sits near the transmit threshold (ledger).
    _report(5, "monotonicity-figs-2-3", not problems,
            "; ".join(problems) or "all three clauses hold", t0, 10.0)


def test_c06_throughput_asymptote():
    t0 = time.time()
    limit = math.log2(5.0)
    etas = []
    for p_val in (1e2, 1e3, 1e4, 1e5, 1e6):
        params = SystemParams(n=2, p=p_val, sigma_d2=1.0, sigma_co=0.0,
                              eps_so=0.25, b1=4)
        etas.append(throughput_exact_cgi(params).eta)
    increasing = all(b > a for a, b in zip(etas, etas[1:]))
    below = all(e <= limit for e in etas)
    close = etas[-1] >= 0.99 * limit
    ok = increasing and below and close
    _report(6, "large-power-asymptote", ok,
            f"eta(P=1e6) = {etas[-1]:.6f} vs log2(5) = {limit:.6f} "
            f"(within 1%: {close}, monotone: {increasing})", t0, 30.0)


def test_c07_cgi_quantization_fig4():
    t0 = time.time()
    worst = {4: 1.0, 5: 1.0}
    for p_val in np.logspace(0, 2, 9):
        base = SystemParams(n=4, p=float(p_val), sigma_d2=1.0, sigma_co=0.05,
                            eps_so=0.02, b1=10, b2=4, delta=1e-4)
        exact = throughput_exact_cgi(base).eta
        for b2 in (4, 5):
            params = base.replace(b2=b2)
            quantizer = build_equalized_quantizer(params)
            eta = throughput_quantized_cgi(params, quantizer).eta
            worst[b2] = min(worst[b2], eta / exact)
    ok = all(r >= 0.95 for r in worst.values())
    # Known structural red: at P=1 the delta=1e-4 truncation alone caps the
    # ratio near 0.88 (transmit probability ~1.5e-3), and b2=4 peaks at ~0.95
    # only beyond P=100 (ledger).
    _report(7, "cgi-quantization-fig4", ok,
            f"min eta/exact over P in [1,100]: b2=4 -> {worst[4]:.3f}, "
            f"b2=5 -> {worst[5]:.3f} (band 0.95)", t0, 60.0)


def test_c08_bit_allocation_fig5():
    t0 = time.time()
    out = {}
    for n in (2, 3, 4):
        for eps in (0.001, 0.01, 0.1):
            params = SystemParams(n=n, p=10.0, sigma_d2=1.0, sigma_co=0.05,
                                  eps_so=eps, b1=10, b2=2, delta=1e-4)
            sweep = sweep_bit_allocation(params, 40)
            out[(n, eps)] = sweep.tau_star
    bad = {k: v for k, v in out.items() if not 0.10 <= v <= 0.35}
    detail = ", ".join(f"N={n},eps={e}: {v:.3f}" for (n, e), v in sorted(out.items()))
    _report(8, "bit-allocation-fig5", not bad, f"tau* {detail}", t0, 300.0)


def test_c09_quantization_efficiency_fig6():
    t0 = time.time()
    problems = []
    values = {}
    for n in (2, 4):
        for eps in (0.001, 0.01, 0.1):
            params = SystemParams(n=n, p=20.0, sigma_d2=1.0, sigma_co=0.03,
                                  eps_so=eps, b1=10, b2=2, delta=1e-4)
            bpa = bits_for_fraction(params, 0.9)
            values[(n, eps)] = bpa
            if not 6.0 <= bpa <= 10.0:
                problems.append(f"N={n},eps={eps}: {bpa:g} not in [6,10]")
        for eps in (0.5, 1.0):
            params = SystemParams(n=n, p=20.0, sigma_d2=1.0, sigma_co=0.03,
                                  eps_so=eps, b1=10, b2=2, delta=1e-4)
            bpa = bits_for_fraction(params, 0.9)
            values[(n, eps)] = bpa
            if bpa > 6.0:
                problems.append(f"N={n},eps={eps}: {bpa:g} > 6")
    detail = ", ".join(f"N={n},eps={e}: {v:g}" for (n, e), v in sorted(values.items()))
    # Known structural red at N=2 with tight eps: one artificial-noise
    # dimension pushes the transmit threshold deep into the gain tail, where
    # the limited-feedback threshold excess is exponentially costly (ledger).
    _report(9, "quantization-efficiency-fig6", not problems,
            f"bits/antenna {detail}", t0, 600.0)


def test_c10_union_bound():
    t0 = time.time()
    rng = np.random.default_rng(11)
    worst_margin = -math.inf
    fails = []
    for k in range(10):
        n = int(rng.integers(2, 7))
        sigma = float(rng.uniform(0.01, 0.2))
        eps = float(rng.uniform(0.01, 0.2))
        bits = b1_min(sigma, eps) + int(rng.integers(1, 8))
        params = SystemParams(n=n, p=float(rng.uniform(1, 100)), sigma_co=sigma,
                              eps_so=eps, b1=bits)
        gain2 = mu_min(params) * float(rng.uniform(1.5, 6.0)) + 0.5
        cfg = SimConfig(params=params, draws=10 ** 6, seed=500 + k, workers=4)
        est = empirical_secrecy_capacity_bound(cfg, gain2)
        margin = est.value - (sigma + eps + 3 * est.std_err)
        worst_margin = max(worst_margin, margin)
        if margin > 0:
            fails.append(k)
    _report(10, "secrecy-capacity-union-bound", not fails,
            f"10 settings at 1e6 draws, worst margin {worst_margin:+.4f} "
            f"(<=0 required)", t0, 300.0)


def test_c11_throughput_nonmonotone_in_sigma():
    t0 = time.time()
    sigmas = np.round(np.arange(0.01, 0.81, 0.01), 10)

    def best_sigma(eps):
        etas = [
            throughput_exact_cgi(
                SystemParams(n=4, p=10.0, sigma_d2=1.0, sigma_co=float(s),
                             eps_so=eps, b1=8)
            ).eta
            for s in sigmas
        ]
        return float(sigmas[int(np.argmax(etas))])

    strict = best_sigma(0.009)
    relaxed = best_sigma(0.033)
    ok = strict > 0.05 and relaxed == pytest.approx(float(sigmas[0]))
    _report(11, "throughput-nonmonotone-in-sigma", ok,
            f"argmax sigma: eps=0.009 -> {strict:.2f} (interior), "
            f"eps=0.033 -> {relaxed:.2f} (grid minimum)", t0, 60.0)
