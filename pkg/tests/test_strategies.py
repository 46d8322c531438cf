import math

import numpy as np
import pytest

from netmix import nets
from netmix.nets import LinearBall, LipschitzBall, TrigAnalytic
from netmix.protocol import run_protocol
from netmix.strategies import (
    AAR,
    aar_bound,
    banach_certificate,
    compact_certificate,
    make_banach_strategy,
    make_compact_strategy,
    make_universal_strategy,
    min_certificate,
    phi,
    shell_for_norm,
    validate_target,
)


def _realizable_run(spec, strat, N, seed, norm_fraction=0.9):
    rng = np.random.default_rng(seed)
    target = nets.random_member(spec, rng, norm_fraction)
    xs = nets.signal_sample(spec, rng, N)
    f = nets.eval_member(target, xs)
    data = [(xs[i], np.array([np.clip(f[i], -1, 1)])) for i in range(N)]
    records = run_protocol(strat, data, N)
    target_loss = float(np.sum((np.clip(f, -1, 1) - f) ** 2))
    return records[-1].cum_loss - target_loss, target


class TestCompact:
    def test_total_prior_mass_at_most_one(self):
        strat = make_compact_strategy(LinearBall(1), 4)
        total = np.exp(strat.state.initial_log_weights).sum()
        assert total <= 1.0 + 1e-9

    def test_level_weight_formula(self):
        strat = make_compact_strategy(LinearBall(1), 3)
        for i, lvl in enumerate(strat.levels, start=1):
            expected = math.log(math.pi ** 2 / 6.0 * i ** 2 * lvl.count)
            assert strat.level_log_inv_weight(i) == pytest.approx(expected)

    @pytest.mark.parametrize("spec", [
        LinearBall(1), LipschitzBall(0, 1, 1, 1), TrigAnalytic(2.0, 1.0)
    ])
    def test_regret_below_certificate(self, spec):
        strat = make_compact_strategy(spec, 2)
        regret, target = _realizable_run(spec, strat, 200, seed=11)
        cert = min_certificate(strat, target, 200)
        assert regret <= cert + 1e-6

    def test_certificate_monotone_in_horizon(self):
        strat = make_compact_strategy(LinearBall(1), 3)
        target = nets.LinearRule([0.5])
        certs = [min_certificate(strat, target, N) for N in (10, 100, 1000)]
        assert certs == sorted(certs)

    def test_certificate_rejects_out_of_class_target(self):
        strat = make_compact_strategy(LinearBall(1, B=1.0), 2)
        with pytest.raises(ValueError):
            compact_certificate(strat, nets.LinearRule([2.0]), 1, 10)


class TestBanach:
    def test_shells_scale_the_ball(self):
        strat = make_banach_strategy(LinearBall(1, B=1.0), 2, 2)
        assert strat.shells[0].class_spec.B == pytest.approx(2.0)
        assert strat.shells[1].class_spec.B == pytest.approx(4.0)

    def test_outer_certificate_adds_shell_overhead(self):
        strat = make_banach_strategy(LinearBall(1), 2, 2)
        inner = compact_certificate(strat.shells[0], None, 1, 50)
        outer = banach_certificate(strat, None, 1, 1, 50)
        assert outer == pytest.approx(
            inner + math.log(math.pi ** 2 / 6.0) / strat.eta
        )

    def test_regret_below_certificate_for_scaled_target(self):
        spec = LinearBall(1, B=1.0)
        strat = make_banach_strategy(spec, 3, 2)
        # target from the doubled ball: only shells j >= 1 contain it
        regret, target = _realizable_run(
            spec.scaled(2.0), strat, 200, seed=5, norm_fraction=0.9
        )
        cert = min_certificate(strat, target, 200)
        assert regret <= cert + 1e-6

    def test_min_certificate_skips_too_small_shells(self):
        strat = make_banach_strategy(LinearBall(1, B=1.0), 2, 2)
        big = nets.LinearRule([3.5])  # norm 3.5: only the j=2 shell (B=4)
        cert = min_certificate(strat, big, 100)
        expected = min(
            banach_certificate(strat, None, 2, i, 100)
            for i in (1, 2)
        )
        assert cert == pytest.approx(expected)

    def test_phi_and_shell_selection(self):
        assert phi(0.5) == 2.0
        assert phi(3.0) == 6.0
        assert shell_for_norm(0.7) == 1
        assert shell_for_norm(2.0) == 1
        assert shell_for_norm(2.1) == 2
        assert shell_for_norm(5.0) == 3


class TestValidateTarget:
    def test_linear_norm(self):
        assert validate_target(LinearBall(2, B=2.0), nets.LinearRule([1.0, 1.0])) \
            == pytest.approx(math.sqrt(2.0))
        with pytest.raises(ValueError):
            validate_target(LinearBall(1, B=1.0), nets.LinearRule([1.5]))

    def test_lipschitz_relative_norm(self):
        rule = nets.LipschitzPLRule(0.0, 1.0, [0.0, 0.5])
        spec = LipschitzBall(0, 1, 1, 1)
        assert validate_target(spec, rule) == pytest.approx(0.5)

    def test_trig_strip_norm(self):
        rule = nets.TrigPolyRule([0.5, 0.0, 0.0])
        assert validate_target(TrigAnalytic(1.0, 1.0), rule) == pytest.approx(0.5)


class TestUniversal:
    def test_mixture_tracks_best_sub_strategy(self):
        spec_a, spec_b = LinearBall(1), LipschitzBall(0, 1, 1, 1)
        sub_a = make_compact_strategy(spec_a, 2)
        sub_b = make_compact_strategy(spec_b, 2)
        uni = make_universal_strategy([sub_a, sub_b])
        solo = make_compact_strategy(spec_a, 2)
        rng = np.random.default_rng(9)
        target = nets.random_member(spec_a, rng, 0.9)
        xs = nets.signal_sample(spec_a, rng, 300)
        f = nets.eval_member(target, xs)
        data = [(xs[i], np.array([np.clip(f[i], -1, 1)])) for i in range(300)]
        uni_loss = run_protocol(uni, data, 300)[-1].cum_loss
        solo_loss = run_protocol(solo, data, 300)[-1].cum_loss
        assert uni_loss <= solo_loss + uni.regret_bound_vs_sub() + 1e-9

    def test_needs_at_least_one(self):
        with pytest.raises(ValueError):
            make_universal_strategy([])


class TestAAR:
    def test_first_round_prediction_is_shrunk(self):
        f = AAR(1, a=1.0)
        assert f.predict([1.0]) == pytest.approx(0.0)
        f.update([1.0], 1.0)
        # theta = (a + 2x^2)^-1 * x*y at predict time
        assert f.predict([1.0]) == pytest.approx(1.0 / 3.0)

    def test_matches_guarantee_on_random_data(self):
        rng = np.random.default_rng(12)
        m, N = 2, 300
        X = rng.uniform(-1, 1, (N, m))
        theta_true = np.array([0.4, -0.3])
        y = np.clip(X @ theta_true + 0.05 * rng.standard_normal(N), -1, 1)
        f = AAR(m)
        loss = 0.0
        for i in range(N):
            mu = f.predict(X[i])
            loss += (y[i] - mu) ** 2
            f.update(X[i], y[i])
        theta_ls = np.linalg.lstsq(X, y, rcond=None)[0]
        comp = float(np.sum((y - X @ theta_ls) ** 2))
        assert loss <= comp + aar_bound(theta_ls, N, 1.0, m) + 1e-6

    def test_input_validation(self):
        with pytest.raises(ValueError):
            AAR(0)
        f = AAR(2)
        with pytest.raises(ValueError):
            f.predict([1.0])


def test_eta_defaults_respect_caps():
    strat = make_compact_strategy(LinearBall(1), 2, Y=2.0)
    assert strat.eta == pytest.approx(1.0 / 32.0)
