import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nblearn.dynamics import InitialCondition
from nblearn.graph import build_ab_graph, complete_graph, cycle_graph, perron
from nblearn.likelihood import (
    binary_consensus,
    consensus_variance,
    estimate_consensus_variance,
    gaussian_consensus,
    poisson_consensus,
    precision_effect,
    predict_consensus,
    weighted_likelihood,
)
from nblearn.scenarios import counterexample_ic
from nblearn.statespace import (
    BINARY,
    FiniteDiscrete,
    Grid,
    NormalizedBelief,
    TruncatedIntegers,
    belief_from_density,
    bernoulli_belief,
    flat_prior,
    gaussian_belief,
    poisson_belief,
)

HALF = np.array([0.5, 0.5])


def poisson_ic(lams, theta_max=400, graph=None):
    space = TruncatedIntegers(theta_max)
    graph = graph or complete_graph(len(lams))
    return InitialCondition.from_beliefs(graph, flat_prior(space), [poisson_belief(space, x) for x in lams])


class TestWeightedLikelihood:
    def test_identical_beliefs(self):
        space = FiniteDiscrete(tuple(range(5)))
        f = belief_from_density(space, [1, 2, 3, 2, 5])
        ic = InitialCondition.from_beliefs(build_ab_graph(2, 3), flat_prior(space), [f] * 6)
        np.testing.assert_allclose(weighted_likelihood(ic).logL, f.logf, atol=1e-12)

    def test_bernoulli_pair(self):
        ic = InitialCondition.from_beliefs(complete_graph(2), flat_prior(BINARY),
                                           [bernoulli_belief(0.9), bernoulli_belief(0.2)])
        L = weighted_likelihood(ic)
        np.testing.assert_allclose(np.exp(L.logL), [math.sqrt(0.1 * 0.8), math.sqrt(0.9 * 0.2)], rtol=1e-12)
        assert predict_consensus(L, ic).predicted_point == 1

    def test_zero_density_gives_minus_inf(self):
        space = FiniteDiscrete((0, 1, 2))
        beliefs = [belief_from_density(space, [1, 1, 0]), belief_from_density(space, [1, 1, 1])]
        ic = InitialCondition.from_beliefs(complete_graph(2), flat_prior(space), beliefs)
        logL = weighted_likelihood(ic).logL
        assert logL[2] == -np.inf and np.all(np.isfinite(logL[:2]))

    def test_uses_centrality_weights(self):
        space = FiniteDiscrete((0, 1, 2))
        g = cycle_graph(5, undirected=False)
        rng = np.random.default_rng(3)
        beliefs = [belief_from_density(space, rng.random(3)) for _ in range(5)]
        ic = InitialCondition.from_beliefs(g, flat_prior(space), beliefs)
        expected = sum(0.2 * b.logf for b in beliefs)
        np.testing.assert_allclose(weighted_likelihood(ic).logL, expected, atol=1e-12)


class TestPredictConsensus:
    def test_poisson_floor(self):
        ic = poisson_ic([2, 1000], theta_max=2000)
        rep = predict_consensus(weighted_likelihood(ic), ic)
        assert rep.predicted_point == 44
        assert rep.hypotheses_hold

    def test_poisson_integer_rate_tie(self):
        # geometric mean of 4 and 9 is exactly 6
        ic = poisson_ic([4, 9])
        rep = predict_consensus(weighted_likelihood(ic), ic)
        assert rep.maximizers == (5.0, 6.0)
        assert rep.predicted_point is None

    def test_counterexample_one(self):
        ic = counterexample_ic(1, 0.5, 60)
        rep = predict_consensus(weighted_likelihood(ic), ic)
        assert rep.predicted_point == 0
        assert rep.gap == pytest.approx(math.log(2), rel=1e-12)
        assert rep.condition("positive gap").passed
        assert not rep.condition("bounded g").passed

    def test_counterexample_two(self):
        ic = counterexample_ic(2, 0.5, 60)
        rep = predict_consensus(weighted_likelihood(ic), ic)
        assert rep.maximizers[0] == 0
        assert not rep.condition("positive gap").passed
        assert rep.condition("bounded g").passed

    def test_gaussian_grid(self):
        grid = Grid(-10, 10, 2001)
        ic = InitialCondition.from_beliefs(complete_graph(2), flat_prior(grid),
                                           [gaussian_belief(grid, 0, 1), gaussian_belief(grid, 1, 3)])
        rep = predict_consensus(weighted_likelihood(ic), ic)
        assert rep.predicted_point == pytest.approx(0.75, abs=0.01)
        assert rep.condition("decay").passed and rep.condition("bounded g").passed

    def test_gaussian_decay_fails_near_edge(self):
        # consensus near the edge of the grid leaves L large beyond 3/4 of the half-width
        grid = Grid(-10, 10, 2001)
        f = gaussian_belief(grid, 8.5, 4, tail_tol=1e-2)
        ic = InitialCondition.from_beliefs(complete_graph(2), flat_prior(grid), [f, f])
        assert not predict_consensus(weighted_likelihood(ic), ic).condition("decay").passed

    def test_report_json(self):
        ic = poisson_ic([4, 9])
        data = predict_consensus(weighted_likelihood(ic), ic).to_json()
        assert data["maximizers"] == [5.0, 6.0] and data["predicted_point"] is None
        assert {c["name"] for c in data["conditions"]} == {"positive gap", "bounded g"}

    def test_gap_nonnegative(self):
        ic = InitialCondition.from_beliefs(complete_graph(2), flat_prior(BINARY), [bernoulli_belief(0.5)] * 2)
        rep = predict_consensus(weighted_likelihood(ic), ic)
        assert rep.gap == 0 and rep.predicted_point is None


class TestBinaryConsensus:
    def test_vote_for_one(self):
        res = binary_consensus([0.9, 0.2], HALF)
        assert res.verdict == 1
        assert res.tally == pytest.approx(0.5 * (math.log(9) + math.log(0.25)))

    def test_all_half_ties(self):
        assert binary_consensus([0.5] * 4, np.full(4, 0.25)).verdict == "tie"

    def test_symmetric_odds_tie(self):
        assert binary_consensus([0.6, 0.4], HALF).verdict == "tie"

    def test_rejects_certainty(self):
        with pytest.raises(ValueError):
            binary_consensus([1.0, 0.2], HALF)

    def test_agrees_with_predict(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 6))
            x = rng.uniform(0.05, 0.95, n)
            g = cycle_graph(n) if n >= 3 else complete_graph(2)
            c = perron(g)
            ic = InitialCondition.from_beliefs(g, flat_prior(BINARY), [bernoulli_belief(xi) for xi in x])
            assert predict_consensus(weighted_likelihood(ic, c)).predicted_point == binary_consensus(x, c).verdict


class TestPoissonConsensus:
    def test_floods(self):
        res = poisson_consensus([2, 1000], HALF)
        assert res.lambda_star == pytest.approx(math.sqrt(2000))
        assert res.point == 44
        assert res.arithmetic_mean == 501

    def test_equal_rates(self):
        res = poisson_consensus([7.5, 7.5], HALF)
        assert res.lambda_star == pytest.approx(7.5) and res.point == 7

    def test_integer_rate(self):
        assert poisson_consensus([4, 9], HALF).point == (5, 6)

    def test_matches_truncated_argmax(self, rng):
        for _ in range(10):
            lams = rng.uniform(0.5, 60, 3)
            ic = poisson_ic(list(lams), graph=cycle_graph(3))
            rep = predict_consensus(weighted_likelihood(ic))
            assert rep.maximizers == tuple(float(p) for p in poisson_consensus(lams, np.full(3, 1 / 3)).points)


class TestGaussianConsensus:
    def test_symmetric_pair(self):
        res = gaussian_consensus([0, 1], [1, 1], HALF)
        assert res.theta_max == pytest.approx(0.5)
        np.testing.assert_allclose(res.c, [0.5, 0.5])
        assert res.S == pytest.approx(0.5)

    def test_dominant_precision(self):
        res = gaussian_consensus([0, 1], [100, 1], HALF)
        assert res.c[0] == pytest.approx(100 / 101)
        assert res.theta_max == pytest.approx(1 / 101)

    def test_perfect_correlation(self):
        rho = np.array([[1, 1], [1, 1.0]])
        assert gaussian_consensus([0, 1], [1, 1], HALF, rho).S == pytest.approx(1.0)

    def test_thresholds(self):
        # V_1 = 2 (1/4) / (1/2)
        assert gaussian_consensus([0, 0], [1, 1], HALF).V[0] == pytest.approx(1.0)

    @pytest.mark.parametrize("rho", [
        [[1, 0.5], [0.4, 1]],
        [[0.9, 0], [0, 1]],
        [[1, 1.2], [1.2, 1]],
    ])
    def test_invalid_correlation(self, rho):
        with pytest.raises(ValueError):
            gaussian_consensus([0, 1], [1, 1], HALF, np.array(rho))

    def test_weights_sum_to_one(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 8))
            v = rng.dirichlet(np.ones(n))
            res = gaussian_consensus(rng.normal(size=n), rng.uniform(0.1, 10, n), v)
            assert abs(res.c.sum() - 1) <= 1e-12
            assert np.all((res.c > 0) & (res.c < 1))

    def test_matches_grid_argmax(self):
        grid = Grid(-10, 10, 2001)
        mus, taus = [-1.0, 2.0, 0.5], [0.7, 4.0, 2.0]
        g = cycle_graph(3)
        ic = InitialCondition.from_beliefs(g, flat_prior(grid), [gaussian_belief(grid, m, t) for m, t in zip(mus, taus)])
        rep = predict_consensus(weighted_likelihood(ic))
        assert rep.predicted_point == pytest.approx(gaussian_consensus(mus, taus, perron(g)).theta_max, abs=0.01)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_variance_increases_with_correlation(self, seed):
        rng = np.random.default_rng(seed)
        tau = rng.uniform(0.5, 5, 3)
        v = rng.dirichlet(np.ones(3))
        grid = np.linspace(-0.5, 1, 16)
        S = []
        for r in grid:
            rho = np.eye(3)
            rho[0, 1] = rho[1, 0] = r
            S.append(consensus_variance(tau, v, rho))
        assert np.all(np.diff(S) > 0)


class TestPrecisionEffect:
    def test_uniform_is_monotone(self):
        res = precision_effect([1, 1, 1], np.full(3, 1 / 3), 0, np.linspace(0.01, 20, 500))
        assert res.v_k <= res.V_k
        assert res.monotone_decreasing and res.turning_point is None

    def test_star_turning_point(self):
        grid = np.linspace(0.001, 2, 200_001)
        res = precision_effect([1, 1, 1, 1], [0.7, 0.1, 0.1, 0.1], 0, grid)
        assert not res.monotone_decreasing
        # grid search is the oracle for the analytic turning point
        assert res.located_extremum == pytest.approx(res.turning_point, rel=0.01)
        assert res.turning_point == pytest.approx(0.5 * 0.3 / 0.49)

    def test_pair_threshold(self):
        res = precision_effect([1, 1], HALF, 0, np.linspace(0.01, 10, 100))
        assert res.V_k == pytest.approx(1.0)
        assert res.monotone_decreasing


class TestMonteCarlo:
    def test_pair_variance(self):
        res = estimate_consensus_variance(0.0, [1, 1], HALF, draws=100_000, seed=1)
        assert res.variance == pytest.approx(0.5, rel=0.05)

    def test_unbiased(self):
        tau, v = [1, 2, 4], np.array([0.2, 0.3, 0.5])
        res = estimate_consensus_variance(1.5, tau, v, draws=20_000, seed=2)
        S = consensus_variance(tau, v)
        assert abs(res.mean - 1.5) <= 4 * math.sqrt(S / 20_000)

    def test_identity_rho_matches_uncorrelated(self):
        tau, v = [1, 3], HALF
        a = estimate_consensus_variance(0, tau, v, draws=50_000, seed=4, rho=np.eye(2))
        assert a.variance == pytest.approx(consensus_variance(tau, v), rel=0.05)
        assert consensus_variance(tau, v, np.eye(2)) == pytest.approx(consensus_variance(tau, v))

    def test_seeded(self):
        a = estimate_consensus_variance(0, [1, 1], HALF, draws=1000, seed=9)
        b = estimate_consensus_variance(0, [1, 1], HALF, draws=1000, seed=9)
        assert a == b

    def test_too_few_draws(self):
        with pytest.raises(ValueError):
            estimate_consensus_variance(0, [1, 1], HALF, draws=10)


class TestScaleInvariance:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-50, 50))
    def test_common_shift(self, seed, shift):
        rng = np.random.default_rng(seed)
        space = TruncatedIntegers(30)
        prior = flat_prior(space)
        raw = rng.normal(size=(3, 31))
        ic = InitialCondition(cycle_graph(3), prior, tuple(NormalizedBelief(space, r) for r in raw))
        moved = InitialCondition(cycle_graph(3), prior, tuple(NormalizedBelief(space, r + shift) for r in raw))
        a = predict_consensus(weighted_likelihood(ic))
        b = predict_consensus(weighted_likelihood(moved))
        assert a.indices == b.indices
