import math

import numpy as np
import pytest

from sld.codebook import sample_qca_error
from sld.errors import FeasibilityError, ParameterError
from sld.outage import (
    b1_min,
    eve_sir_factor,
    feasibility_report,
    mu_min,
    pco_qca,
    pso,
    r1_rate,
    r2_rate,
    rb_max,
    re_min,
)
from sld.params import SystemParams

P_HAND = SystemParams(n=2, p=1.0, sigma_d2=1.0, sigma_co=0.1, eps_so=0.05, b1=2)


def test_pco_branches():
    phi, gain2 = 0.5, 1.0
    r1 = r1_rate(P_HAND, phi, gain2)
    r2 = r2_rate(P_HAND, phi, gain2)
    assert pco_qca(P_HAND, r1 * 0.5, phi, gain2) == 0.0
    assert pco_qca(P_HAND, r2 + 0.1, phi, gain2) == 1.0


def test_pco_hand_value():
    # n=2, b1=2, p=1, noise 1, gain 1, phi 0.5, rb = log2(1.4):
    # numerator 0.5 - 0.4 = 0.1, denominator 0.5 + 0.2 = 0.7 -> 1 - 4/7.
    value = pco_qca(P_HAND, math.log2(1.4), 0.5, 1.0)
    assert value == pytest.approx(3.0 / 7.0, abs=1e-12)


def test_pco_hand_value_monte_carlo():
    # Same point estimated by sampling the cap-law error directly.
    rng = np.random.default_rng(0)
    err = sample_qca_error(2, 2, rng, size=10 ** 6)
    cos2 = 1.0 - err
    sinr = cos2 * 0.5 / ((1.0 - cos2) * 0.5 + 1.0)
    frac = np.mean(np.log2(1.0 + sinr) <= math.log2(1.4))
    assert abs(frac - 3.0 / 7.0) < 3 * math.sqrt(3 / 7 * 4 / 7 / 10 ** 6)


def test_pco_continuity_at_boundaries():
    phi, gain2 = 0.35, 2.3
    r1 = r1_rate(P_HAND, phi, gain2)
    r2 = r2_rate(P_HAND, phi, gain2)
    assert pco_qca(P_HAND, r1 + 1e-12, phi, gain2) < 1e-9
    assert pco_qca(P_HAND, r2 - 1e-12, phi, gain2) > 1.0 - 1e-9


def test_pco_monotone_in_rb():
    rates = np.linspace(0.0, 3.0, 50)
    values = [pco_qca(P_HAND, float(r), 0.5, 1.0) for r in rates]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_pco_validates_phi():
    with pytest.raises(ParameterError):
        pco_qca(P_HAND, 1.0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        pco_qca(P_HAND, 1.0, 1.0, 1.0)


def test_pso_values():
    assert pso(P_HAND, 0.0, 0.3) == 1.0
    assert pso(P_HAND, 5.0, 1.0) == 1.0
    assert pso(P_HAND, 1.0, 0.5) == pytest.approx(0.5, abs=1e-15)


def test_pso_ignores_gain_and_eavesdropper_variance():
    params = SystemParams(n=4, p=7.0, sigma_g2=1.0)
    for sg2 in (0.1, 1.0, 10.0):
        assert pso(params.replace(sigma_g2=sg2), 1.3, 0.4) == pso(params, 1.3, 0.4)


def test_rb_max_inverts_pco():
    for sigma in (0.1, 0.3, 3.0 / 7.0, 0.9):
        params = P_HAND.replace(sigma_co=sigma)
        rb = rb_max(params, 0.5, 1.0)
        assert pco_qca(params, rb, 0.5, 1.0) == pytest.approx(sigma, abs=1e-9)
    assert rb_max(P_HAND.replace(sigma_co=3.0 / 7.0), 0.5, 1.0) == pytest.approx(
        math.log2(1.4), abs=1e-12
    )


def test_rb_max_endpoints():
    assert rb_max(P_HAND.replace(sigma_co=0.0), 0.5, 1.0) == pytest.approx(
        r1_rate(P_HAND, 0.5, 1.0), abs=1e-12
    )
    assert rb_max(P_HAND.replace(sigma_co=1.0), 0.5, 1.0) == pytest.approx(
        r2_rate(P_HAND, 0.5, 1.0), abs=1e-12
    )


def test_rb_max_monotone_in_gain_and_bits():
    gains = [0.5, 1.0, 2.0, 4.0]
    values = [rb_max(P_HAND, 0.5, g) for g in gains]
    assert all(b > a for a, b in zip(values, values[1:]))
    values = [rb_max(P_HAND.replace(b1=b), 0.5, 1.0) for b in range(1, 12)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_re_min_values_and_round_trip():
    assert re_min(P_HAND.replace(eps_so=1.0), 0.7) == 0.0
    params = SystemParams(n=2, p=1.0, eps_so=0.5)
    assert re_min(params, 0.5) == pytest.approx(1.0, abs=1e-12)
    for phi in (0.1, 0.5, 0.9):
        for eps in (0.05, 0.3, 0.9):
            p = SystemParams(n=3, p=1.0, eps_so=eps)
            assert pso(p, re_min(p, phi), phi) == pytest.approx(eps, abs=1e-10)
    assert re_min(P_HAND, 1e-12) == pytest.approx(0.0, abs=1e-10)


def test_b1_min_table():
    expected = {
        (1.0, 1.0): 1, (1.0, 0.1): 1, (1.0, 0.01): 1, (1.0, 0.001): 1,
        (0.1, 1.0): 1, (0.1, 0.1): 4, (0.1, 0.01): 7, (0.1, 0.001): 10,
        (0.01, 1.0): 1, (0.01, 0.1): 4, (0.01, 0.01): 7, (0.01, 0.001): 10,
    }
    for (sigma, eps), want in expected.items():
        assert b1_min(sigma, eps) == want


def test_b1_min_strict_ceiling_at_integer():
    # log2((1-0)/0.25) = 2 exactly; the smallest integer strictly above is 3.
    assert b1_min(0.0, 0.25) == 3


def test_b1_min_threshold_matches_zero_noise_rate_for_all_n():
    # Independent route: with a noise-free receiver the achievable secret
    # rate is log2((1-q)(n-1)/(q*gamma)), positive exactly when 2^b1 exceeds
    # (1-sigma)/eps. The bit threshold must match that for every n,
    # including the exact-power-of-two corner that forces the strict ceiling.
    for sigma, eps in ((0.1, 0.01), (0.0, 0.25), (0.3, 0.2)):
        need = b1_min(sigma, eps)
        for n in range(2, 17):
            gamma = eve_sir_factor(n, eps)

            def zero_noise_rate(bits):
                q = ((1.0 - sigma) / 2.0 ** bits) ** (1.0 / (n - 1))
                return math.log2((1.0 - q) * (n - 1) / (q * gamma))

            assert zero_noise_rate(need) > 0
            if need > 1:
                assert zero_noise_rate(need - 1) <= 1e-12


def test_pso_monotone_in_phi():
    params = SystemParams(n=4, p=1.0)
    values = [pso(params, 1.2, float(f)) for f in np.linspace(0.05, 0.95, 19)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_b1_min_corner_above_one():
    # eps > 1 - sigma makes the log negative; clamps at 1.
    assert b1_min(0.5, 0.9) == 1


def test_b1_min_rejects_zero_eps():
    with pytest.raises(FeasibilityError):
        b1_min(0.1, 0.0)


def test_mu_min_hand_value():
    params = SystemParams(n=2, p=1.0, sigma_d2=1.0, sigma_co=0.75, eps_so=0.25, b1=2)
    assert mu_min(params) == pytest.approx(4.0, abs=1e-12)


def test_mu_min_bisection_oracle():
    # mu_min is where max over phi of rb_max - re_min crosses zero.
    params = SystemParams(n=2, p=1.0, sigma_d2=1.0, sigma_co=0.75, eps_so=0.25, b1=2)

    def max_rate(gain2):
        phis = np.linspace(1e-4, 1.0 - 1e-4, 4001)
        return max(rb_max(params, float(f), gain2) - re_min(params, float(f)) for f in phis)

    lo, hi = 0.1, 50.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if max_rate(mid) > 0:
            hi = mid
        else:
            lo = mid
    assert 0.5 * (lo + hi) == pytest.approx(mu_min(params), abs=1e-3)


def test_mu_min_zero_noise():
    params = SystemParams(n=3, p=2.0, sigma_d2=0.0, sigma_co=0.1, eps_so=0.05, b1=8)
    assert mu_min(params) == 0.0


def test_mu_min_infeasible_bits():
    params = SystemParams(n=2, p=1.0, sigma_co=0.1, eps_so=0.01, b1=3)
    with pytest.raises(FeasibilityError) as excinfo:
        mu_min(params)
    assert excinfo.value.report.b1_min == 7
    assert math.isinf(excinfo.value.report.mu_min)
    assert not excinfo.value.report.feasible_bits


def test_mu_min_monotone():
    base = SystemParams(n=3, p=2.0, sigma_co=0.1, eps_so=0.05, b1=6)
    values = [mu_min(base.replace(b1=b)) for b in range(6, 20)]
    assert all(b < a for a, b in zip(values, values[1:]))
    values = [mu_min(base.replace(p=p)) for p in (0.5, 1.0, 2.0, 8.0)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_eve_sir_factor():
    assert eve_sir_factor(2, 1.0) == 0.0
    assert eve_sir_factor(2, 0.25) == pytest.approx(3.0)
    assert eve_sir_factor(4, 0.001) == pytest.approx(27.0)


def test_feasibility_report_round_trip():
    params = SystemParams(n=4, p=10.0, sigma_co=0.1, eps_so=0.01, b1=10)
    report = feasibility_report(params)
    assert report.feasible_bits
    assert report.b1_min == 7
    assert report.mu_min == pytest.approx(mu_min(params))
