import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from addmarkov.chain import AdditiveChainSpec, StepWiseChainSpec, linear_memory
from addmarkov.correlation import CorrelationSeq, correlation_from_memory
from addmarkov.entropy import cpdf_table, source_entropy, stationary_distribution
from addmarkov.equivalence import (DistMoments, EntropyMatchError, correlation_aggregates,
                                   dist_closed_form, dist_monte_carlo, map_empirical,
                                   map_to_stepwise, match_entropy)
from addmarkov.generator import GenerationConfig, generate

from conftest import boundary_additive, random_additive


def exact_dist(add, sw):
    """Oracle: Dist averaged over the exact stationary N-word law."""
    pi = stationary_distribution(add).probs
    p_ad = cpdf_table(add)
    words = np.arange(1 << add.order)
    k = np.array([bin(w).count("1") for w in words])
    p_sw = (0.5 - sw.nu) + sw.mu * (2.0 * k / add.order - 1.0)
    return float(np.sum(pi * 2 * (p_sw - p_ad) ** 2))


def test_aggregates_memoryless():
    order = 6
    K = CorrelationSeq(0.5, np.r_[0.25, np.zeros(order)])
    agg = correlation_aggregates(K, np.zeros(order), order)
    assert agg.avg_K == 0
    assert agg.K_star_F == 0
    assert agg.double_avg_K == pytest.approx(1 / (4 * order))


def test_aggregates_flat_correlator():
    order = 5
    agg = correlation_aggregates(CorrelationSeq(0.5, np.full(order + 1, 0.25)), np.zeros(order), order)
    assert agg.avg_K == pytest.approx(0.25)
    assert agg.double_avg_K == pytest.approx(0.25)
    assert 0.5 * agg.avg_K / agg.double_avg_K == pytest.approx(0.5)


def test_aggregates_too_few_lags(fig_spec):
    with pytest.raises(ValueError):
        correlation_aggregates(correlation_from_memory(fig_spec, 5), fig_spec.memory, 10)


def test_memoryless_biased():
    rep = map_to_stepwise(AdditiveChainSpec(4, 0.7, np.zeros(4)))
    assert rep.mu == 0
    assert rep.nu == pytest.approx(-0.2, abs=1e-15)
    assert 0.5 - rep.nu == pytest.approx(0.7)
    assert rep.dist == pytest.approx(0, abs=1e-30)
    assert rep.inv_tau == 0


def test_constant_memory_is_exact():
    rng = np.random.default_rng(11)
    for _ in range(50):
        order = int(rng.integers(1, 21))
        abar = float(rng.uniform(0.1, 0.9))
        f0 = float(rng.uniform(-1, 1)) * 0.95 * min(abar, 1 - abar) / order
        rep = map_to_stepwise(AdditiveChainSpec(order, abar, np.full(order, f0)))
        assert rep.mu == pytest.approx(order * f0 / 2, abs=1e-13)
        assert rep.nu == pytest.approx(0.5 * (1 - 2 * abar) * (1 - 2 * rep.mu), abs=1e-13)
        assert abs(rep.dist) < 1e-15


def test_fig_spec_mu(fig_spec):
    # for linear memory the Toeplitz column sums are palindromic, so mu = F0 (N-1)/4 exactly
    rep = map_to_stepwise(fig_spec)
    assert rep.mu == pytest.approx(0.15 * 9 / 4, abs=1e-14)
    assert rep.nu == pytest.approx(0, abs=1e-15)
    assert rep.inv_tau == pytest.approx(math.log((1 + 2 * rep.mu) / (1 - 2 * rep.mu)) / 20)


def test_linear_memory_identity_any_order():
    for order in (2, 5, 13, 20):
        f0 = 0.9 / (order - 1) if order > 1 else 0.5
        rep = map_to_stepwise(AdditiveChainSpec(order, 0.5, linear_memory(order, f0)))
        assert rep.mu == pytest.approx(f0 * (order - 1) / 4, abs=1e-12)


def test_mu_forms_agree_for_constant_memory():
    rep = map_to_stepwise(AdditiveChainSpec(8, 0.5, np.full(8, 0.05)))
    assert rep.mu_spread < 1e-10


def test_mu_forms_reported(fig_spec):
    rep = map_to_stepwise(fig_spec)
    d = rep.to_dict()
    assert set(d["mu_alt_forms"]) == {"mu2", "mu_centred", "spread"}
    assert d["K_mode"] == "exact"
    assert rep.stepwise(10).mu == rep.mu


def test_dist_closed_form_matches_exact_oracle():
    rng = np.random.default_rng(5)
    for _ in range(15):
        add = random_additive(rng, max_order=10)
        K = correlation_from_memory(add, add.order)
        rep = map_to_stepwise(add)
        for sw in (StepWiseChainSpec(add.order, rep.mu, rep.nu), StepWiseChainSpec(add.order, 0.0, 0.0),
                   StepWiseChainSpec(add.order, 0.1, -0.05)):
            assert dist_closed_form(add, sw, K) == pytest.approx(exact_dist(add, sw), rel=1e-9, abs=1e-14)


def test_dist_zero_memory_form():
    add = AdditiveChainSpec(3, 0.6, [0.1, -0.05, 0.2])
    K = correlation_from_memory(add, 3)
    F = add.memory
    expected = 2 * (0.6 - 0.5) ** 2 + 2 * F @ K.lag_matrix(3) @ F
    assert dist_closed_form(add, StepWiseChainSpec(3, 0, 0), K) == pytest.approx(expected, rel=1e-14)


def test_dist_monte_carlo_fig_spec(fig_spec):
    rep = map_to_stepwise(fig_spec)
    sw = rep.stepwise(10)
    seq = generate(fig_spec, GenerationConfig(10**6, seed=3))
    from addmarkov.equivalence import _positions
    p_ad, k = _positions(fig_spec, seq)
    diff2 = 2 * ((0.5 - sw.nu) + sw.mu * (2 * k / 10 - 1) - p_ad) ** 2
    se = diff2.std() / math.sqrt(len(diff2))
    assert abs(dist_monte_carlo(fig_spec, sw, seq) - rep.dist) < 3 * se * 3  # allow for autocorrelation


def test_dist_monte_carlo_constant_image():
    add = AdditiveChainSpec(6, 0.5, np.full(6, 0.06))
    rep = map_to_stepwise(add)
    seq = generate(add, GenerationConfig(10**5, seed=1))
    assert dist_monte_carlo(add, rep.stepwise(6), seq) < 1e-25


def test_positions_against_direct_cpdf():
    from addmarkov.equivalence import _positions
    add = AdditiveChainSpec(4, 0.4, [0.1, -0.2, 0.05, 0.15])
    seq = generate(add, GenerationConfig(200, seed=2))
    p_ad, k = _positions(add, seq)
    a = seq.symbols
    for i in range(4, 200):
        assert p_ad[i - 4] == pytest.approx(add.cpdf_one(a[i - 4:i]), abs=1e-14)
        assert k[i - 4] == a[i - 4:i].sum()


def test_dist_moments_match_direct():
    rng = np.random.default_rng(9)
    add = random_additive(rng, max_order=8)
    seq = generate(add, GenerationConfig(50_000, seed=4))
    mom = DistMoments.from_sequence(add, seq)
    for mu, nu in [(0, 0), (0.1, 0.02), (-0.2, 0.1)]:
        direct = dist_monte_carlo(add, StepWiseChainSpec(add.order, mu, nu), seq)
        assert mom.dist(mu, nu) == pytest.approx(direct, rel=1e-9)
    mu, nu = mom.minimizer()
    grid = mom.dist(mu + np.linspace(-0.05, 0.05, 11)[:, None], nu + np.linspace(-0.05, 0.05, 11))
    assert np.all(grid >= mom.dist(mu, nu) - 1e-15)


def test_closed_form_is_grid_minimum():
    rng = np.random.default_rng(12)
    for _ in range(10):
        add = random_additive(rng, max_order=12)
        K = correlation_from_memory(add, add.order)
        rep = map_to_stepwise(add)
        best = rep.dist
        for dmu in np.linspace(-0.02, 0.02, 5):
            for dnu in np.linspace(-0.02, 0.02, 5):
                d = dist_closed_form(add, StepWiseChainSpec(add.order, rep.mu + dmu, rep.nu + dnu), K)
                assert d >= best - 1e-15


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mu_strictly_inside(seed):
    rng = np.random.default_rng(seed)
    for spec in (random_additive(rng), boundary_additive(rng)):
        assert abs(map_to_stepwise(spec).mu) < 0.5


def test_anti_persistent_negative_mu():
    rep = map_to_stepwise(AdditiveChainSpec(1, 0.5, [-0.4]))
    assert rep.mu == pytest.approx(-0.2)
    assert map_to_stepwise(AdditiveChainSpec(5, 0.5, np.full(5, -0.08))).mu < 0


def test_map_empirical_close_to_exact(fig_spec):
    seq = generate(fig_spec, GenerationConfig(10**6, seed=8))
    rep = map_empirical(fig_spec, seq)
    assert rep.K_mode == "empirical"
    assert rep.mu == pytest.approx(0.3375, abs=1e-12)  # identity holds for any K
    assert abs(rep.mu2 - map_to_stepwise(fig_spec).mu2) < 0.02


def test_match_entropy_memoryless():
    assert match_entropy(AdditiveChainSpec(4, 0.5, np.zeros(4)), 4) == 0.0


def test_match_entropy_constant_memory():
    add = AdditiveChainSpec(6, 0.5, np.full(6, 0.05))
    assert match_entropy(add, 6) == pytest.approx(0.15, abs=1e-6)


def test_match_entropy_fig_spec(fig_spec):
    mu_prime = match_entropy(fig_spec, 10)
    assert mu_prime > 0.345
    assert source_entropy(StepWiseChainSpec(10, mu_prime)) == pytest.approx(source_entropy(fig_spec), abs=1e-6)


def test_match_entropy_errors(fig_spec, monkeypatch):
    with pytest.raises(ValueError):
        match_entropy(fig_spec, 11)
    import addmarkov.equivalence as eq
    real = eq.source_entropy
    monkeypatch.setattr(eq, "source_entropy",
                        lambda spec: 0.8 if isinstance(spec, AdditiveChainSpec) else real(spec))
    with pytest.raises(EntropyMatchError, match="exceeds"):
        match_entropy(fig_spec, 10)
    monkeypatch.setattr(eq, "source_entropy",
                        lambda spec: -1.0 if isinstance(spec, AdditiveChainSpec) else real(spec))
    with pytest.raises(EntropyMatchError, match="below"):
        match_entropy(fig_spec, 10)
