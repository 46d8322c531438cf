"""On-line regression protocol: signals, bounded observations, quadratic loss.

The round loop drives any strategy (an object with ``predict(x)`` and
``update(x, y)``) against any data source.  Observations are constrained
to the ball of radius Y; a violation aborts the run rather than being
silently clipped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ProtocolViolation",
    "RoundRecord",
    "quadratic_loss",
    "clip",
    "run_protocol",
    "write_rounds_csv",
]


class ProtocolViolation(Exception):
    """An observation fell outside the Y-ball; carries the round index."""

    def __init__(self, round_index: int, value, bound: float):
        self.round_index = round_index
        self.value = value
        self.bound = bound
        super().__init__(
            f"observation {value!r} outside Y-ball (Y={bound}) at round {round_index}"
        )


@dataclass(frozen=True)
class RoundRecord:
    n: int
    signal: np.ndarray
    prediction: np.ndarray
    observation: np.ndarray
    loss: float
    cum_loss: float


def _as_vector(v) -> np.ndarray:
    a = np.atleast_1d(np.asarray(v, dtype=float))
    if a.ndim != 1:
        raise ValueError(f"expected scalar or 1-d vector, got shape {a.shape}")
    return a


def quadratic_loss(y, mu) -> float:
    """Squared Euclidean distance ||y - mu||^2 between observation and prediction."""
    ya, ma = _as_vector(y), _as_vector(mu)
    if ya.shape != ma.shape:
        raise ValueError(f"dimension mismatch: {ya.shape} vs {ma.shape}")
    d = ya - ma
    return float(d @ d)


def clip(mu, Y: float):
    """Project a prediction onto the ball of radius Y.

    For scalars this is interval clamping to [-Y, Y]; for vectors the value
    is rescaled to norm Y when it lies outside the ball.
    """
    if Y <= 0:
        raise ValueError("Y must be positive")
    a = np.asarray(mu, dtype=float)
    if a.ndim == 0:
        return float(np.clip(a, -Y, Y))
    norm = float(np.linalg.norm(a))
    if norm <= Y:
        return a
    return a * (Y / norm)


def run_protocol(strategy, data_source: Iterable, N: int, Y: float = 1.0) -> list[RoundRecord]:
    """Run the round loop for N rounds.

    Per round the strategy sees x_n, commits to mu_n, then observes y_n and
    is updated.  Observations outside the Y-ball abort with
    :class:`ProtocolViolation`.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    records: list[RoundRecord] = []
    cum = 0.0
    it = iter(data_source)
    for n in range(1, N + 1):
        x, y = next(it)
        x = _as_vector(x)
        y = _as_vector(y)
        if float(np.linalg.norm(y)) > Y * (1 + 1e-12):
            raise ProtocolViolation(n, y, Y)
        mu = _as_vector(strategy.predict(x))
        loss = quadratic_loss(y, mu)
        strategy.update(x, y)
        cum += loss
        records.append(RoundRecord(n, x, mu, y, loss, cum))
    return records


def write_rounds_csv(records: Sequence[RoundRecord], path) -> None:
    """Serialize round records with columns n, x, mu, y, loss, cum_loss."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "x", "mu", "y", "loss", "cum_loss"])
        for r in records:
            w.writerow(
                [
                    r.n,
                    ";".join(repr(v) for v in r.signal),
                    ";".join(repr(v) for v in r.prediction),
                    ";".join(repr(v) for v in r.observation),
                    repr(r.loss),
                    repr(r.cum_loss),
                ]
            )
