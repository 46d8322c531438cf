"""Ground-truth oracles and closed-form bound utilities.

Everything here is pure: best-in-class losses used to measure regret,
the epsilon-tradeoff minimizer, the empirical approachability function,
and the theoretical bound-shape curves used for exponent-fitting
displays (never as asserted inequalities; their universal constant is
reported as a fitted value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nets import ClassSpec, LinearBall, LipschitzBall, NetLevel

__all__ = [
    "TradeoffProblem",
    "solve_tradeoff",
    "best_in_net_loss",
    "best_linear_loss",
    "empirical_approachability",
    "bound_curve",
    "fit_exponent",
]


@dataclass(frozen=True)
class TradeoffProblem:
    """Objective A*eps^-a + B*eps^b over eps in (0, inf)."""

    A: float
    a: float
    B: float
    b: float

    def __post_init__(self):
        if min(self.A, self.a, self.B, self.b) <= 0:
            raise ValueError("all four tradeoff parameters must be positive")

    def value(self, eps):
        eps = np.asarray(eps, dtype=float)
        return self.A * eps ** -self.a + self.B * eps ** self.b


def solve_tradeoff(p: TradeoffProblem) -> dict:
    """Closed-form minimizer of A*eps^-a + B*eps^b.

    Returns the exact minimizer/minimum and the equate-the-addends
    approximation, which is always within a factor 2 of the exact minimum.
    """
    A, a, B, b = p.A, p.a, p.B, p.b
    s = a + b
    eps_star = (A * a / (B * b)) ** (1.0 / s)
    min_value = ((a / b) ** (b / s) + (b / a) ** (a / s)) * A ** (b / s) * B ** (a / s)
    approx_eps = (A / B) ** (1.0 / s)
    approx_value = 2.0 * A ** (b / s) * B ** (a / s)
    assert min_value <= approx_value * (1 + 1e-12)
    assert approx_value <= 2.0 * min_value * (1 + 1e-12)
    return {
        "epsilon_star": float(eps_star),
        "min_value": float(min_value),
        "approx_epsilon": float(approx_eps),
        "approx_value": float(approx_value),
    }


def _losses_per_expert(level: NetLevel, data) -> np.ndarray:
    xs = [np.atleast_1d(x) for x, _ in data]
    ys = np.array([float(np.asarray(y).reshape(-1)[0]) for _, y in data])
    losses = np.zeros(level.count)
    for x, y in zip(xs, ys):
        d = level.pool.eval_all(x) - y
        losses += d * d
    return losses


def best_in_net_loss(level: NetLevel, data) -> tuple[int, float]:
    """Exhaustive minimum of the cumulative squared loss over a net level.

    Ties break toward the lowest expert id.
    """
    if level.count < 1:
        raise ValueError("empty net")
    losses = _losses_per_expert(level, data)
    k = int(np.argmin(losses))
    return k, float(losses[k])


def _data_matrices(data):
    X = np.stack([np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in data])
    y = np.array([float(np.asarray(v).reshape(-1)[0]) for _, v in data])
    return X, y


def _ridge_theta(X, y, lam):
    m = X.shape[1]
    return np.linalg.solve(X.T @ X + lam * np.eye(m), X.T @ y)


def constrained_linear_fit(X, y, radius: float, tol: float = 1e-10) -> np.ndarray:
    """Least squares subject to ||theta|| <= radius, via the ridge path.

    The norm-constrained minimizer is theta(lam) for the lam >= 0 with
    ||theta(lam)|| = radius (or lam = 0 when unconstrained already);
    ||theta(lam)|| is decreasing in lam, so bisection applies.
    """
    theta0 = np.linalg.lstsq(X, y, rcond=None)[0]
    if np.linalg.norm(theta0) <= radius:
        return theta0
    lo, hi = 0.0, 1.0
    while np.linalg.norm(_ridge_theta(X, y, hi)) > radius:
        hi *= 2.0
        if hi > 1e18:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(_ridge_theta(X, y, mid)) > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(1.0, hi):
            break
    return _ridge_theta(X, y, hi)


def best_linear_loss(data, B: float | None = None) -> tuple[np.ndarray, float]:
    """Best linear rule: unconstrained least squares (minimum-norm solution),
    or constrained to the coefficient ball of radius B when given."""
    X, y = _data_matrices(data)
    if B is None:
        theta = np.linalg.lstsq(X, y, rcond=None)[0]
    else:
        theta = constrained_linear_fit(X, y, B)
    r = y - X @ theta
    return theta, float(r @ r)


def _pl_fit_mse(xs, ys, spec: LipschitzBall, radius: float, knots: int = 65) -> float:
    """Min mean squared loss of a piecewise-linear rule with class norm <= radius.

    The norm is max(sup/bound, Lip/c) relative to the base spec, so the
    feasible set at ``radius`` has |v_i| <= radius*bound and
    |v_{i+1}-v_i| <= radius*c*delta.  Solved as a small QP.
    """
    import cvxpy as cp

    t = np.linspace(spec.a, spec.b, knots)
    delta = t[1] - t[0]
    # interpolation design matrix
    s = np.clip((xs - spec.a) / delta, 0, knots - 1 - 1e-12)
    i = np.floor(s).astype(int)
    w = s - i
    A = np.zeros((xs.size, knots))
    A[np.arange(xs.size), i] = 1.0 - w
    A[np.arange(xs.size), i + 1] = w
    v = cp.Variable(knots)
    cons = [
        cp.abs(v) <= radius * spec.bound,
        cp.abs(cp.diff(v)) <= radius * spec.c * delta,
    ]
    prob = cp.Problem(cp.Minimize(cp.sum_squares(A @ v - ys)), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        prob.solve(solver=cp.SCS)
    return float(prob.value) / xs.size


def empirical_approachability(
    data,
    spec: ClassSpec,
    epsilon: float,
    ceiling: float = 64.0,
    tol: float = 1e-4,
) -> dict:
    """Minimal class norm of a rule with mean squared loss <= epsilon.

    Supported for LinearBall (norm ||theta||_2) and LipschitzBall (norm
    max(sup/bound, Lip/c)); bisection over the norm radius with a
    constrained-fit oracle inside.  Returns the radius, and an
    infeasibility flag when even the ceiling cannot reach epsilon.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not data:
        raise ValueError("data must be nonempty")
    X, y = _data_matrices(data)
    n = y.size

    if isinstance(spec, LinearBall):
        def mse_at(r):
            theta = constrained_linear_fit(X, y, r)
            d = y - X @ theta
            return float(d @ d) / n
    elif isinstance(spec, LipschitzBall):
        xs = X[:, 0]

        def mse_at(r):
            return _pl_fit_mse(xs, y, spec, r)
    else:
        raise NotImplementedError(
            f"approachability not supported for {type(spec).__name__}"
        )

    if mse_at(0.0) <= epsilon:
        return {"radius": 0.0, "infeasible": False}
    if mse_at(ceiling) > epsilon:
        return {"radius": ceiling, "infeasible": True}
    lo, hi = 0.0, ceiling
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mse_at(mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    return {"radius": hi, "infeasible": False}


def bound_curve(kind: str, params: dict, N_range) -> list[dict]:
    """Theoretical regret-term shapes with a free (fitted) constant.

    kinds: ``finite_dim`` -> log N; ``analytic`` -> log^M N;
    ``sobolev`` -> L^(1/(gamma+1)) * N^(gamma/(gamma+1)); for the
    Lipschitz special case use sobolev with gamma=1 and L=c*l.
    """
    rows = []
    for N in N_range:
        if kind == "finite_dim":
            shape = math.log(N)
        elif kind == "analytic":
            M = params.get("M", 2)
            shape = math.log(N) ** M / params.get("h", 1.0)
        elif kind == "sobolev":
            g = params.get("gamma", 1.0)
            L = params.get("L", params.get("c", 1.0) * params.get("l", 1.0))
            shape = L ** (1.0 / (g + 1.0)) * N ** (g / (g + 1.0))
        else:
            raise ValueError(f"unknown bound kind {kind!r}")
        rows.append({"N": N, "shape_value": shape})
    return rows


def fit_exponent(Ns, values) -> tuple[float, float]:
    """OLS fit of log(value) vs log(N); returns (exponent, R^2).

    Values are floored at a small positive constant so early horizons
    with near-zero regret do not blow up the log.
    """
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), 1e-9))
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)
