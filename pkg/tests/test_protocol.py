import numpy as np
import pytest

from netmix.protocol import (
    ProtocolViolation,
    clip,
    quadratic_loss,
    run_protocol,
    write_rounds_csv,
)


class ZeroStrategy:
    def predict(self, x):
        return 0.0

    def update(self, x, y):
        pass


class EchoLastStrategy:
    """Predicts the previous observation (0 on the first round)."""

    def __init__(self):
        self.last = 0.0

    def predict(self, x):
        return self.last

    def update(self, x, y):
        self.last = float(np.asarray(y).reshape(-1)[0])


class TestClip:
    def test_scalar_inside(self):
        assert clip(0.3, 1.0) == 0.3

    def test_scalar_clamped(self):
        assert clip(2.5, 1.0) == 1.0
        assert clip(-7.0, 2.0) == -2.0

    def test_vector_rescaled_not_clamped(self):
        v = clip(np.array([3.0, 4.0]), 1.0)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        # direction preserved
        assert v[1] / v[0] == pytest.approx(4.0 / 3.0)

    def test_vector_inside_untouched(self):
        v = np.array([0.1, -0.2])
        assert np.allclose(clip(v, 1.0), v)

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            clip(0.0, 0.0)


class TestQuadraticLoss:
    def test_scalar(self):
        assert quadratic_loss(1.0, 0.25) == pytest.approx(0.5625)

    def test_vector(self):
        assert quadratic_loss([1.0, 0.0], [0.0, 1.0]) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            quadratic_loss([1.0, 0.0], [1.0])


class TestRunProtocol:
    def test_cum_loss_monotone_and_consistent(self):
        rng = np.random.default_rng(0)
        data = [(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)) for _ in range(50)]
        records = run_protocol(ZeroStrategy(), data, 50)
        cums = np.array([r.cum_loss for r in records])
        losses = np.array([r.loss for r in records])
        assert np.all(np.diff(cums) >= 0)
        assert cums[-1] == pytest.approx(losses.sum())
        assert records[9].cum_loss == pytest.approx(losses[:10].sum())

    def test_observation_outside_ball_aborts(self):
        data = [(np.array([0.0]), np.array([0.5])),
                (np.array([0.0]), np.array([1.5]))]
        with pytest.raises(ProtocolViolation) as ei:
            run_protocol(ZeroStrategy(), data, 2, Y=1.0)
        assert ei.value.round_index == 2

    def test_update_sees_observation_after_commit(self):
        # the echo strategy's prediction at round n equals y_{n-1}: the
        # prediction can never use the current observation
        data = [(np.array([0.0]), np.array([v])) for v in (0.5, -0.5, 0.25)]
        records = run_protocol(EchoLastStrategy(), data, 3)
        assert records[0].prediction[0] == 0.0
        assert records[1].prediction[0] == 0.5
        assert records[2].prediction[0] == -0.5

    def test_bad_horizon(self):
        with pytest.raises(ValueError):
            run_protocol(ZeroStrategy(), [], 0)


def test_rounds_csv_roundtrip_bytes(tmp_path):
    rng = np.random.default_rng(3)
    data = [(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)) for _ in range(10)]
    records = run_protocol(ZeroStrategy(), data, 10)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_rounds_csv(records, p1)
    write_rounds_csv(records, p2)
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header == "n,x,mu,y,loss,cum_loss"
