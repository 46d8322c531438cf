import math

import numpy as np
import pytest

from netmix import nets
from netmix.nets import (
    LinearBall,
    LipschitzBall,
    NetTooLargeError,
    TrigAnalytic,
    build_lipschitz_net,
    build_linear_net,
    build_net,
    build_trig_net,
    covering_factor,
    dyadic_net_family,
    entropy_bits,
    eval_member,
    net_size,
    nearest_candidate,
    random_member,
    signal_sample,
    trig_degree,
)


class TestLinearNets:
    def test_one_dim_half_eps_grid(self):
        # m=1, X2=B=1, eps=1/2: pitch 1 gives exactly {-1, 0, 1}
        level = build_linear_net(LinearBall(1), 0.5)
        thetas = sorted(level.pool.thetas[:, 0])
        assert thetas == pytest.approx([-1.0, 0.0, 1.0])

    def test_coarse_eps_collapses_to_zero(self):
        level = build_linear_net(LinearBall(2), 5.0)
        assert level.count == 1
        assert np.allclose(level.pool.thetas, 0.0)

    def test_all_grid_points_inside_ball(self):
        spec = LinearBall(2, X2=1.0, B=1.5)
        level = build_linear_net(spec, 0.25)
        norms = np.linalg.norm(level.pool.thetas, axis=1)
        assert norms.max() <= spec.B + 1e-12

    def test_size_matches_built_count(self):
        for eps in (0.5, 0.25, 0.125):
            spec = LinearBall(2)
            assert net_size(spec, eps) == build_linear_net(spec, eps).count

    def test_cap_enforced_with_exact_count(self):
        spec = LinearBall(3)
        n = net_size(spec, 0.01)
        with pytest.raises(NetTooLargeError) as ei:
            build_linear_net(spec, 0.01, cap=1000)
        assert ei.value.count == n


class TestLipschitzNets:
    def test_unit_example_count(self):
        # c=l=bound=1 at eps=1/2: 5 first values * 3^2 difference paths
        spec = LipschitzBall(0.0, 1.0, 1.0, 1.0)
        assert net_size(spec, 0.5) == 45
        assert build_lipschitz_net(spec, 0.5).count == 45

    def test_experts_are_lipschitz_and_bounded(self):
        spec = LipschitzBall(0.0, 1.0, 1.0, 1.0)
        level = build_lipschitz_net(spec, 0.25)
        vals = level.pool.values
        assert np.abs(vals).max() <= spec.bound + 1e-12
        dx = level.pool.delta
        slopes = np.abs(np.diff(vals, axis=1)) / dx
        assert slopes.max() <= spec.c + 1e-9

    def test_coarse_eps_single_zero_expert(self):
        level = build_lipschitz_net(LipschitzBall(0, 1, 1, 1), 3.0)
        assert level.count == 1

    def test_entropy_avoids_materialization(self):
        # eps small enough that the net could never be built
        spec = LipschitzBall(0.0, 1.0, 1.0, 1.0)
        bits = entropy_bits(spec, 1e-3)
        assert bits == pytest.approx(
            math.log2(2 * 1000 + 1) + 1000 * math.log2(3.0)
        )


class TestTrigNets:
    def test_degree_formula_example(self):
        assert trig_degree(TrigAnalytic(h=1.0, c=1.0), 0.1) >= 4

    def test_degree_zero_for_coarse_eps(self):
        assert trig_degree(TrigAnalytic(h=1.0, c=1.0), 1.5) == 0

    def test_size_matches_built_count(self):
        spec = TrigAnalytic(h=2.0, c=1.0)
        for eps in (0.5, 0.25):
            assert net_size(spec, eps) == build_trig_net(spec, eps).count

    def test_coefficients_inside_decay_disks(self):
        spec = TrigAnalytic(h=2.0, c=1.0)
        level = build_trig_net(spec, 0.25)
        J = level.pool.J
        coeffs = level.pool.coeffs
        assert np.abs(coeffs[:, 0]).max() <= spec.c + 1e-12
        for j in range(1, J + 1):
            r = np.hypot(coeffs[:, 2 * j - 1], coeffs[:, 2 * j])
            assert r.max() <= spec.c * math.exp(-spec.h * j) + 1e-12

    def test_trivial_fallback_when_zero_net_suffices(self):
        # h=0.5 nets blow past any cap, but c <= 2*eps makes the zero
        # polynomial a legitimate factor-2 cover
        spec = TrigAnalytic(h=0.5, c=1.0)
        assert net_size(spec, 0.5) > nets.DEFAULT_EXPERT_CAP
        level = build_trig_net(spec, 0.5)
        assert level.count == 1

    def test_no_fallback_for_fine_eps(self):
        spec = TrigAnalytic(h=0.5, c=1.0)
        with pytest.raises(NetTooLargeError):
            build_trig_net(spec, 0.125)


class TestDyadicFamily:
    def test_counts_nondecreasing(self):
        for spec in (LinearBall(1), LipschitzBall(0, 1, 1, 1), TrigAnalytic(2.0, 1.0)):
            counts = [lvl.count for lvl in dyadic_net_family(spec, 3)]
            assert counts == sorted(counts)

    def test_cap_error_reports_feasible_depth(self):
        with pytest.raises(NetTooLargeError) as ei:
            dyadic_net_family(LipschitzBall(0, 1, 1, 1), 8)
        assert "largest feasible i_max" in str(ei.value)

    def test_epsilons_are_dyadic(self):
        levels = dyadic_net_family(LinearBall(1), 4)
        assert [lvl.epsilon for lvl in levels] == [0.5, 0.25, 0.125, 0.0625]


class TestMembersAndCovering:
    def test_random_members_inside_ball(self):
        rng = np.random.default_rng(0)
        from netmix.strategies import validate_target

        for spec in (LinearBall(2), LipschitzBall(0, 1, 1, 1), TrigAnalytic(1.0, 1.0)):
            for _ in range(20):
                member = random_member(spec, rng)
                validate_target(spec, member)  # raises if outside

    def test_norm_fraction_pins_linear_norm(self):
        rng = np.random.default_rng(1)
        m = random_member(LinearBall(3, B=2.0), rng, norm_fraction=0.5)
        assert np.linalg.norm(m.theta) == pytest.approx(1.0)

    @pytest.mark.parametrize("spec", [
        LinearBall(1), LinearBall(2),
        LipschitzBall(0, 1, 1, 1),
        TrigAnalytic(1.0, 1.0), TrigAnalytic(2.0, 1.0),
    ])
    def test_quantization_covers_members(self, spec):
        rng = np.random.default_rng(7)
        level = build_net(spec, 0.5)
        factor = covering_factor(spec)
        if isinstance(spec, LinearBall):
            xs = np.linspace(-spec.X2, spec.X2, 101)
        elif isinstance(spec, LipschitzBall):
            xs = np.linspace(spec.a, spec.b, 257)
        else:
            xs = np.linspace(0, 2 * np.pi, 512)
        for _ in range(25):
            member = random_member(spec, rng)
            _, dist = nearest_candidate(level, member, xs)
            assert dist <= factor * level.epsilon * (1 + 1e-9)

    def test_signal_sample_shapes_and_ranges(self):
        rng = np.random.default_rng(2)
        xs = signal_sample(LinearBall(3, X2=2.0), rng, 100)
        assert xs.shape == (100, 3)
        assert np.linalg.norm(xs, axis=1).max() <= 2.0 + 1e-12
        xs = signal_sample(LipschitzBall(-1, 2, 1, 1), rng, 50)
        assert xs.min() >= -1 and xs.max() <= 2
        xs = signal_sample(TrigAnalytic(1, 1), rng, 50)
        assert xs.min() >= 0 and xs.max() <= 2 * np.pi


class TestEvalMember:
    def test_linear_batch_matches_scalar_calls(self):
        rng = np.random.default_rng(3)
        member = random_member(LinearBall(1), rng)
        xs = rng.uniform(-1, 1, (10, 1))
        batch = eval_member(member, xs)
        singles = [member(x) for x in xs]
        assert np.allclose(batch, singles)

    def test_interval_rules_use_first_column(self):
        rng = np.random.default_rng(4)
        member = random_member(LipschitzBall(0, 1, 1, 1), rng)
        xs = rng.uniform(0, 1, (10, 1))
        assert np.allclose(eval_member(member, xs), member(xs[:, 0]))


def test_net_csv_lists_every_expert(tmp_path):
    level = build_net(LinearBall(1), 0.5)
    path = tmp_path / "nets.csv"
    nets.write_net_csv([level], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + level.count
    assert lines[0] == "expert_id,kind,epsilon,params"
