"""Exponential-weights mixture of experts for squared loss on the Y-ball.

Weights live in the natural-log domain and are renormalized so their
maximum is zero after every update; with nets of 1e5+ experts over
thousands of rounds, linear-domain weights underflow.

The mixture prediction is the weight-normalized mean of the expert
predictions (then clipped), which is valid because exp(-eta*||y-mu||^2)
is concave in mu on the relevant region for eta <= 1/(8 Y^2); the scalar
mode permits eta up to 1/(2 Y^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AggregatorState",
    "aa_init",
    "aa_predict",
    "aa_update",
    "aa_regret_bound",
    "verify_concavity",
    "eta_cap",
]


def eta_cap(Y: float, scalar_mode: bool) -> float:
    """Largest admissible learning rate for the given mode."""
    return 1.0 / (2.0 * Y * Y) if scalar_mode else 1.0 / (8.0 * Y * Y)


@dataclass
class AggregatorState:
    log_weights: np.ndarray          # current, max-normalized to 0
    initial_log_weights: np.ndarray  # ln(w_i) at init; bounds use these
    eta: float
    Y: float
    scalar_mode: bool = False

    @property
    def expert_count(self) -> int:
        return self.log_weights.shape[0]


def _normalize(logw: np.ndarray) -> np.ndarray:
    return logw - logw.max()


def aa_init(
    initial_weights,
    eta: float,
    Y: float = 1.0,
    scalar_mode: bool = False,
) -> AggregatorState:
    """Create aggregator state from positive weights summing to <= 1.

    Deficient mixtures (sum < 1) are allowed: unassigned mass only
    strengthens the regret guarantee.  A sum above 1 (beyond 1e-9) is
    rejected.
    """
    w = np.asarray(initial_weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d vector")
    if np.any(w <= 0):
        raise ValueError("all weights must be strictly positive")
    total = float(w.sum())
    if total > 1.0 + 1e-9:
        raise ValueError(f"weights sum to {total}, which exceeds 1")
    if eta <= 0 or eta > eta_cap(Y, scalar_mode) * (1 + 1e-12):
        raise ValueError(
            f"eta={eta} outside (0, {eta_cap(Y, scalar_mode)}] for "
            f"{'scalar' if scalar_mode else 'vector'} mode"
        )
    logw = np.log(w)
    return AggregatorState(
        log_weights=_normalize(logw.copy()),
        initial_log_weights=logw,
        eta=float(eta),
        Y=float(Y),
        scalar_mode=scalar_mode,
    )


def _check_aligned(state: AggregatorState, expert_predictions: np.ndarray) -> np.ndarray:
    p = np.asarray(expert_predictions, dtype=float)
    if p.shape[0] != state.expert_count:
        raise ValueError(
            f"{p.shape[0]} expert predictions for {state.expert_count} experts"
        )
    return p


def aa_predict(state: AggregatorState, expert_predictions):
    """Weight-normalized mean of expert predictions, clipped to the Y-ball.

    ``expert_predictions`` has shape (K,) for scalar predictions or (K, d)
    for vector ones.
    """
    from .protocol import clip

    p = _check_aligned(state, expert_predictions)
    w = np.exp(state.log_weights)
    w /= w.sum()
    mu = w @ p
    if p.ndim == 1:
        return clip(float(mu), state.Y)
    return clip(mu, state.Y)


def aa_update(state: AggregatorState, expert_predictions, y) -> AggregatorState:
    """Fold an observation into the weights: logw_i -= eta * ||y - F_i||^2."""
    p = _check_aligned(state, expert_predictions)
    ya = np.asarray(y, dtype=float)
    if p.ndim == 1:
        losses = (ya - p) ** 2
    else:
        d = p - ya[np.newaxis, :]
        losses = np.einsum("kd,kd->k", d, d)
    state.log_weights -= state.eta * losses
    state.log_weights = _normalize(state.log_weights)
    return state


def aa_regret_bound(state: AggregatorState, expert_index: int) -> float:
    """Guaranteed regret term ln(1/w_i)/eta against expert i (initial weights)."""
    if not 0 <= expert_index < state.expert_count:
        raise IndexError(f"expert index {expert_index} out of range")
    return float(-state.initial_log_weights[expert_index] / state.eta)


def verify_concavity(
    eta: float,
    Y: float = 1.0,
    d: int = 1,
    grid_resolution: int = 64,
) -> dict:
    """Scan mu -> exp(-eta*||y - mu||^2) for convex spots; report-only.

    Second differences are taken along segments through the radius-Y
    neighbourhood of each observation y, for a grid of y in the Y-ball;
    this is the region where the weighted-mean substitution must shed
    loss.  Returns a dict with ``passed`` and the worst (most positive)
    second difference found, normalized by the squared step.
    """
    if eta <= 0 or Y <= 0:
        raise ValueError("eta and Y must be positive")
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    if grid_resolution < 16:
        raise ValueError("grid_resolution must be >= 16")

    g = grid_resolution
    worst = -np.inf
    worst_at = None
    if d == 1:
        ys = np.linspace(-Y, Y, g)
        h = 2.0 * Y / (g - 1)
        for y in ys:
            mu = np.linspace(y - Y, y + Y, g)
            f = np.exp(-eta * (y - mu) ** 2)
            sec = (f[:-2] - 2 * f[1:-1] + f[2:]) / (h * h)
            i = int(np.argmax(sec))
            if sec[i] > worst:
                worst = float(sec[i])
                worst_at = (float(y), float(mu[i + 1]))
    else:
        # radial symmetry: scan segments in a set of directions through
        # each y, with y on a polar grid of the Y-ball
        radii = np.linspace(0.0, Y, max(4, g // 8))
        angles = np.linspace(0.0, 2 * np.pi, max(8, g // 4), endpoint=False)
        dirs = np.stack(
            [np.cos(np.linspace(0, np.pi, 8, endpoint=False)),
             np.sin(np.linspace(0, np.pi, 8, endpoint=False))], axis=1
        )
        t = np.linspace(-Y, Y, g)
        h = 2.0 * Y / (g - 1)
        for r in radii:
            for a in angles:
                y = np.array([r * np.cos(a), r * np.sin(a)])
                for u in dirs:
                    mu = y[np.newaxis, :] + t[:, np.newaxis] * u[np.newaxis, :]
                    dd = mu - y[np.newaxis, :]
                    f = np.exp(-eta * np.einsum("ij,ij->i", dd, dd))
                    sec = (f[:-2] - 2 * f[1:-1] + f[2:]) / (h * h)
                    i = int(np.argmax(sec))
                    if sec[i] > worst:
                        worst = float(sec[i])
                        worst_at = (tuple(y), tuple(mu[i + 1]))
    return {
        "passed": bool(worst <= 1e-9),
        "worst_second_difference": worst,
        "location": worst_at,
        "eta": eta,
        "Y": Y,
        "d": d,
    }
