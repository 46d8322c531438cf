import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netmix.aggregator import (
    aa_init,
    aa_predict,
    aa_regret_bound,
    aa_update,
    eta_cap,
    verify_concavity,
)


class TestInit:
    def test_rejects_mass_above_one(self):
        with pytest.raises(ValueError):
            aa_init([0.7, 0.7], eta=0.125)

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            aa_init([0.5, 0.0], eta=0.125)

    def test_deficient_mixture_allowed(self):
        st_ = aa_init([0.1, 0.1], eta=0.125)
        assert st_.expert_count == 2

    def test_eta_caps(self):
        assert eta_cap(1.0, scalar_mode=False) == pytest.approx(0.125)
        assert eta_cap(1.0, scalar_mode=True) == pytest.approx(0.5)
        with pytest.raises(ValueError):
            aa_init([0.5, 0.5], eta=0.5, scalar_mode=False)
        aa_init([0.5, 0.5], eta=0.5, scalar_mode=True)  # fine

    def test_regret_bound_uses_initial_weights(self):
        st_ = aa_init([0.25, 0.75], eta=0.125)
        assert aa_regret_bound(st_, 0) == pytest.approx(np.log(4.0) / 0.125)
        # updates must not change the guarantee
        aa_update(st_, np.array([0.1, -0.1]), 1.0)
        assert aa_regret_bound(st_, 0) == pytest.approx(np.log(4.0) / 0.125)


class TestPredictUpdate:
    def test_equal_weights_mean(self):
        st_ = aa_init([0.5, 0.5], eta=0.125)
        assert aa_predict(st_, np.array([1.0, 0.0])) == pytest.approx(0.5)

    def test_prediction_clipped(self):
        st_ = aa_init([1.0], eta=0.125, Y=1.0)
        assert aa_predict(st_, np.array([3.0])) == 1.0

    def test_update_shifts_mass_toward_accurate_expert(self):
        st_ = aa_init([0.5, 0.5], eta=0.125)
        for _ in range(200):
            aa_update(st_, np.array([1.0, -1.0]), 1.0)
        assert aa_predict(st_, np.array([1.0, -1.0])) > 0.99

    def test_max_normalization_keeps_weights_finite(self):
        st_ = aa_init(np.full(1000, 1e-3), eta=0.125)
        rng = np.random.default_rng(1)
        preds = rng.uniform(-1, 1, 1000)
        for _ in range(5000):
            aa_update(st_, preds, 1.0)
        assert np.isfinite(st_.log_weights).all()
        assert st_.log_weights.max() == 0.0

    def test_vector_observations(self):
        st_ = aa_init([0.5, 0.5], eta=0.125, Y=1.0)
        preds = np.array([[0.5, 0.0], [0.0, 0.5]])
        mu = aa_predict(st_, preds)
        assert np.allclose(mu, [0.25, 0.25])
        aa_update(st_, preds, np.array([0.5, 0.0]))
        w = np.exp(st_.log_weights)
        assert w[0] > w[1]


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.sampled_from([0.05, 0.125, 0.5]))
def test_regret_never_exceeds_bound(seed, eta):
    """Mixture loss minus any expert's loss stays below ln(1/w_i)/eta."""
    rng = np.random.default_rng(seed)
    k, n = 8, 60
    w = rng.uniform(0.1, 1.0, k)
    w /= w.sum() * rng.uniform(1.0, 1.5)  # possibly deficient
    state = aa_init(w, eta=eta, scalar_mode=True)
    expert_losses = np.zeros(k)
    mix_loss = 0.0
    for _ in range(n):
        preds = rng.uniform(-1, 1, k)
        y = rng.uniform(-1, 1)
        mu = aa_predict(state, preds)
        mix_loss += (y - mu) ** 2
        expert_losses += (y - preds) ** 2
        aa_update(state, preds, y)
    bounds = -state.initial_log_weights / eta
    assert np.all(mix_loss - expert_losses <= bounds + 1e-9)


class TestConcavity:
    def test_admissible_rates_pass(self):
        for eta, Y, d in [(0.125, 1.0, 1), (0.125, 1.0, 2), (0.5, 1.0, 1)]:
            out = verify_concavity(eta, Y, d)
            assert out["passed"], out

    def test_excessive_rate_fails(self):
        out = verify_concavity(2.0, 1.0, 1)
        assert not out["passed"]
        assert out["worst_second_difference"] > 0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            verify_concavity(-1.0)
        with pytest.raises(ValueError):
            verify_concavity(0.125, d=3)
