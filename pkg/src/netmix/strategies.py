"""Prediction strategies built from nets and the exponential-weights mixture.

* ``CompactStrategy`` -- a flat mixture over a dyadic family of net levels
  with level weights (6/pi^2) i^-2 split uniformly inside each level.
* ``BanachStrategy`` -- an outer mixture over CompactStrategies for the
  class ball scaled by 2^j, shell weights (6/pi^2) j^-2.
* ``AAR`` -- the ridge-style linear forecaster whose regularizer includes
  the current signal at prediction time.
* ``UniversalStrategy`` -- an equal-weight mixture over arbitrary
  sub-strategies (used for cross-class domination experiments).

Each net-mixture strategy exposes a finite-horizon regret certificate
with all constants realized: ln(1/w)/eta plus the covering slack
4*Y*(covering_factor*2^-i)*N.
"""

from __future__ import annotations

import math

import numpy as np

from . import nets
from .aggregator import AggregatorState, aa_init, aa_predict, aa_update
from .nets import ClassSpec, LinearBall, LipschitzBall, NetLevel, TrigAnalytic

__all__ = [
    "CompactStrategy",
    "BanachStrategy",
    "AAR",
    "UniversalStrategy",
    "make_compact_strategy",
    "make_banach_strategy",
    "make_universal_strategy",
    "compact_certificate",
    "banach_certificate",
    "min_certificate",
    "phi",
    "shell_for_norm",
    "aar_bound",
    "validate_target",
]

_ZETA2 = math.pi ** 2 / 6.0


def phi(norm: float) -> float:
    """Shell-selection functional 2*max(1, ||F||)."""
    return 2.0 * max(1.0, norm)


def shell_for_norm(norm: float) -> int:
    """Smallest shell index j >= 1 with 2^j >= ||F||."""
    return max(1, math.ceil(math.log2(max(norm, 1e-300))))


class CompactStrategy:
    """Flat exponential-weights mixture over a dyadic net family."""

    def __init__(self, levels: list[NetLevel], Y: float, eta: float,
                 scalar_mode: bool = True):
        self.levels = levels
        self.Y = float(Y)
        self.eta = float(eta)
        counts = [lvl.count for lvl in levels]
        weights = np.concatenate(
            [
                np.full(cnt, (1.0 / _ZETA2) * (i + 1) ** -2 / cnt)
                for i, cnt in enumerate(counts)
            ]
        )
        self.state: AggregatorState = aa_init(weights, eta, Y, scalar_mode=scalar_mode)
        self._slices = []
        start = 0
        for cnt in counts:
            self._slices.append(slice(start, start + cnt))
            start += cnt
        self._last_x = None
        self._last_preds = None

    @property
    def class_spec(self) -> ClassSpec:
        return self.levels[0].class_spec

    def _expert_predictions(self, x: np.ndarray) -> np.ndarray:
        if self._last_x is not None and np.array_equal(x, self._last_x):
            return self._last_preds
        preds = np.concatenate([lvl.pool.eval_all(x) for lvl in self.levels])
        np.clip(preds, -self.Y, self.Y, out=preds)  # experts pre-clipped
        self._last_x = np.array(x, copy=True)
        self._last_preds = preds
        return preds

    def predict(self, x) -> float:
        return aa_predict(self.state, self._expert_predictions(np.atleast_1d(x)))

    def update(self, x, y) -> None:
        p = self._expert_predictions(np.atleast_1d(x))
        yv = np.asarray(y, dtype=float).reshape(-1)
        aa_update(self.state, p, yv[0] if yv.size == 1 else yv)
        self._last_x = None
        self._last_preds = None

    def level_log_inv_weight(self, level_i: int) -> float:
        """ln(1/w) for any expert of level i (1-based)."""
        lvl = self.levels[level_i - 1]
        return math.log(_ZETA2 * level_i ** 2 * lvl.count)


class BanachStrategy:
    """Outer mixture over per-shell CompactStrategies, shell j covers 2^j * ball."""

    def __init__(self, shells: list[CompactStrategy], Y: float, eta: float,
                 scalar_mode: bool = True):
        self.shells = shells
        self.Y = float(Y)
        self.eta = float(eta)
        weights = np.array(
            [(1.0 / _ZETA2) * (j + 1) ** -2 for j in range(len(shells))]
        )
        self.state = aa_init(weights, eta, Y, scalar_mode=scalar_mode)
        self._last_x = None
        self._last_preds = None

    def _shell_predictions(self, x: np.ndarray) -> np.ndarray:
        if self._last_x is not None and np.array_equal(x, self._last_x):
            return self._last_preds
        preds = np.array([s.predict(x) for s in self.shells])
        self._last_x = np.array(x, copy=True)
        self._last_preds = preds
        return preds

    def predict(self, x) -> float:
        return aa_predict(self.state, self._shell_predictions(np.atleast_1d(x)))

    def update(self, x, y) -> None:
        xv = np.atleast_1d(x)
        p = self._shell_predictions(xv)
        yv = np.asarray(y, dtype=float).reshape(-1)
        aa_update(self.state, p, yv[0] if yv.size == 1 else yv)
        for s in self.shells:
            s.update(xv, y)
        self._last_x = None
        self._last_preds = None


class UniversalStrategy:
    """Equal-weight mixture over arbitrary sub-strategies."""

    def __init__(self, strategies: list, Y: float = 1.0, eta: float = 0.125,
                 scalar_mode: bool = True):
        self.strategies = strategies
        self.Y = float(Y)
        self.eta = float(eta)
        k = len(strategies)
        self.state = aa_init(np.full(k, 1.0 / k), eta, Y, scalar_mode=scalar_mode)
        self._last_x = None
        self._last_preds = None

    def _sub_predictions(self, x):
        if self._last_x is not None and np.array_equal(x, self._last_x):
            return self._last_preds
        preds = np.array([s.predict(x) for s in self.strategies])
        self._last_x = np.array(x, copy=True)
        self._last_preds = preds
        return preds

    def predict(self, x) -> float:
        return aa_predict(self.state, self._sub_predictions(np.atleast_1d(x)))

    def update(self, x, y) -> None:
        xv = np.atleast_1d(x)
        p = self._sub_predictions(xv)
        yv = np.asarray(y, dtype=float).reshape(-1)
        aa_update(self.state, p, yv[0] if yv.size == 1 else yv)
        for s in self.strategies:
            s.update(xv, y)
        self._last_x = None
        self._last_preds = None

    def regret_bound_vs_sub(self) -> float:
        return math.log(len(self.strategies)) / self.eta


def make_compact_strategy(
    spec: ClassSpec,
    i_max: int,
    Y: float = 1.0,
    eta: float | None = None,
    cap: int = nets.DEFAULT_EXPERT_CAP,
    scalar_mode: bool = True,
) -> CompactStrategy:
    if eta is None:
        eta = 1.0 / (8.0 * Y * Y)
    levels = nets.dyadic_net_family(spec, i_max, cap)
    return CompactStrategy(levels, Y, eta, scalar_mode=scalar_mode)


def make_banach_strategy(
    spec: ClassSpec,
    i_max: int,
    j_max: int,
    Y: float = 1.0,
    eta: float | None = None,
    cap: int = nets.DEFAULT_EXPERT_CAP,
    scalar_mode: bool = True,
) -> BanachStrategy:
    if eta is None:
        eta = 1.0 / (8.0 * Y * Y)
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    shells = [
        CompactStrategy(
            nets.dyadic_net_family(spec.scaled(2.0 ** j), i_max, cap),
            Y, eta, scalar_mode=scalar_mode,
        )
        for j in range(1, j_max + 1)
    ]
    return BanachStrategy(shells, Y, eta, scalar_mode=scalar_mode)


def make_universal_strategy(strategies: list, Y: float = 1.0,
                            eta: float = 0.125) -> UniversalStrategy:
    if not strategies:
        raise ValueError("need at least one sub-strategy")
    return UniversalStrategy(strategies, Y, eta)


def validate_target(spec: ClassSpec, target, radius_factor: float = 1.0,
                    tol: float = 1e-6) -> float:
    """Check a rule lies in the (scaled) class ball; returns its class norm."""
    if isinstance(spec, LinearBall):
        norm = float(np.linalg.norm(target.theta))
        limit = spec.B * radius_factor
    elif isinstance(spec, LipschitzBall):
        norm = max(
            target.sup_bound() / spec.bound,
            target.lipschitz_coefficient() / spec.c,
        )
        limit = radius_factor
        norm *= 1.0  # relative norm; limit is the factor itself
    elif isinstance(spec, TrigAnalytic):
        norm = target.strip_sup(spec.h)
        limit = spec.c * radius_factor
    else:
        raise TypeError(f"unknown class spec {spec!r}")
    if norm > limit * (1 + tol):
        raise ValueError(f"target norm {norm} outside class ball radius {limit}")
    return norm


def compact_certificate(strategy: CompactStrategy, target, level_i: int,
                        N: int) -> float:
    """Finite-horizon regret certificate at one level.

    ln(1/w_{i,k})/eta for the level's (uniform) expert weight, plus the
    covering slack 4*Y*(covering_factor*2^-i)*N.
    """
    if not 1 <= level_i <= len(strategy.levels):
        raise IndexError(f"no level {level_i}")
    if target is not None:
        validate_target(strategy.class_spec, target)
    lvl = strategy.levels[level_i - 1]
    cf = nets.covering_factor(strategy.class_spec)
    slack = 4.0 * strategy.Y * cf * lvl.epsilon * N
    return strategy.level_log_inv_weight(level_i) / strategy.eta + slack


def banach_certificate(strategy: BanachStrategy, target, shell_j: int,
                       level_i: int, N: int) -> float:
    """Inner compact certificate at shell j plus the outer mixture overhead."""
    if not 1 <= shell_j <= len(strategy.shells):
        raise IndexError(f"no shell {shell_j}")
    shell = strategy.shells[shell_j - 1]
    if target is not None:
        validate_target(shell.class_spec, target)
    inner = compact_certificate(shell, None, level_i, N)
    outer = math.log(_ZETA2 * shell_j ** 2) / strategy.eta
    return inner + outer


def min_certificate(strategy, target, N: int) -> float:
    """Minimum certificate over levels (and shells, for Banach strategies)."""
    if isinstance(strategy, CompactStrategy):
        return min(
            compact_certificate(strategy, target, i, N)
            for i in range(1, len(strategy.levels) + 1)
        )
    if isinstance(strategy, BanachStrategy):
        best = math.inf
        for j in range(1, len(strategy.shells) + 1):
            shell = strategy.shells[j - 1]
            try:
                if target is not None:
                    validate_target(shell.class_spec, target)
            except ValueError:
                continue  # target outside this shell's ball
            for i in range(1, len(shell.levels) + 1):
                best = min(best, banach_certificate(strategy, None, j, i, N))
        return best
    raise TypeError(f"no certificate for {type(strategy)}")


class AAR:
    """Ridge-style linear forecaster; the current signal joins the regularizer.

    predict(x) returns x^T (A + x x^T)^{-1} b with A = a*I + sum x_k x_k^T
    and b = sum y_k x_k; this predict-time inclusion of x x^T is what
    distinguishes the forecaster from plain ridge regression.
    """

    def __init__(self, m: int, a: float = 1.0):
        if m < 1 or a <= 0:
            raise ValueError("need m >= 1 and a > 0")
        self.m = m
        self.a = float(a)
        self.A = a * np.eye(m)
        self.b = np.zeros(m)

    def predict(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.m,):
            raise ValueError(f"signal dimension {x.shape} != ({self.m},)")
        theta = np.linalg.solve(self.A + np.outer(x, x), self.b)
        return float(theta @ x)

    def update(self, x, y) -> None:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        yv = float(np.asarray(y).reshape(-1)[0])
        self.A += np.outer(x, x)
        self.b += yv * x


def aar_bound(theta, N: int, X_inf: float, m: int) -> float:
    """Regret term ||theta||^2 + m*ln(N*X_inf^2 + 1) of the forecaster's guarantee."""
    t = np.atleast_1d(np.asarray(theta, dtype=float))
    return float(t @ t) + m * math.log(N * X_inf ** 2 + 1.0)
