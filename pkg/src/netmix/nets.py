"""Finite covering nets (expert pools) for the benchmark function classes.

Three class kinds are supported:

* ``LinearBall`` -- linear rules x -> <theta, x> with ||theta||_2 <= B over
  signals of l2 norm <= X2.  Nets are coefficient grids; covering factor 1.
* ``LipschitzBall`` -- c-Lipschitz functions on an interval, bounded in
  absolute value.  Nets are quantized piecewise-linear paths on a knot
  grid; covering factor 2.
* ``TrigAnalytic`` -- 2*pi-periodic functions analytic on the strip
  |Im z| < h with sup norm at most c there.  Nets are trigonometric
  polynomials with lattice-quantized Fourier coefficients confined to the
  decay disks |c_j| <= c*exp(-h*j); covering factor 2.

Exact expert counts stand in for the asymptotic metric entropy in every
downstream weight and bound computation.  Counts are available without
materializing the expert list (``net_size``), so entropy audits work far
beyond the materialization cap.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "eval_member",
    "LinearBall",
    "LipschitzBall",
    "TrigAnalytic",
    "ClassSpec",
    "NetLevel",
    "NetTooLargeError",
    "LinearRule",
    "LipschitzPLRule",
    "TrigPolyRule",
    "ConstantRule",
    "DEFAULT_EXPERT_CAP",
    "trig_degree",
    "net_size",
    "entropy_bits",
    "build_linear_net",
    "build_lipschitz_net",
    "build_trig_net",
    "build_net",
    "dyadic_net_family",
    "covering_factor",
    "random_member",
    "nearest_candidate",
    "signal_sample",
    "write_net_csv",
]

DEFAULT_EXPERT_CAP = 2_000_000


# ---------------------------------------------------------------------------
# class specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearBall:
    m: int
    X2: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        if self.m < 1 or self.X2 <= 0 or self.B <= 0:
            raise ValueError("LinearBall requires m >= 1 and positive radii")

    def scaled(self, factor: float) -> "LinearBall":
        return LinearBall(self.m, self.X2, self.B * factor)

    @property
    def kind(self) -> str:
        return "linear"


@dataclass(frozen=True)
class LipschitzBall:
    a: float = 0.0
    b: float = 1.0
    c: float = 1.0
    bound: float = 1.0

    def __post_init__(self):
        if self.b <= self.a or self.c <= 0 or self.bound <= 0:
            raise ValueError("LipschitzBall requires b > a and positive c, bound")

    @property
    def length(self) -> float:
        return self.b - self.a

    def scaled(self, factor: float) -> "LipschitzBall":
        return LipschitzBall(self.a, self.b, self.c * factor, self.bound * factor)

    @property
    def kind(self) -> str:
        return "lipschitz"


@dataclass(frozen=True)
class TrigAnalytic:
    h: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.h <= 0 or self.c <= 0:
            raise ValueError("TrigAnalytic requires positive h and c")

    def scaled(self, factor: float) -> "TrigAnalytic":
        return TrigAnalytic(self.h, self.c * factor)

    @property
    def kind(self) -> str:
        return "trig"


ClassSpec = Union[LinearBall, LipschitzBall, TrigAnalytic]


def covering_factor(spec: ClassSpec) -> float:
    """Allowed multiple of the nominal epsilon for the constructed nets."""
    return 1.0 if isinstance(spec, LinearBall) else 2.0


class NetTooLargeError(Exception):
    """A requested net exceeds the expert cap; carries the exact count."""

    def __init__(self, count: int, cap: int, detail: str = ""):
        self.count = count
        self.cap = cap
        super().__init__(
            f"net would contain {count} experts, over the cap of {cap}"
            + (f" ({detail})" if detail else "")
        )


# ---------------------------------------------------------------------------
# prediction rules
# ---------------------------------------------------------------------------

class LinearRule:
    """x -> <theta, x>."""

    kind = "linear"

    def __init__(self, theta):
        self.theta = np.atleast_1d(np.asarray(theta, dtype=float))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim <= 1:
            return float(np.dot(self.theta, np.atleast_1d(x)))
        return x @ self.theta

    def params(self):
        return self.theta


class ConstantRule:
    kind = "constant"

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim <= 1:
            return self.value
        return np.full(x.shape[0], self.value)

    def params(self):
        return np.array([self.value])


class LipschitzPLRule:
    """Piecewise-linear interpolation through values at equispaced knots."""

    kind = "lipschitz"

    def __init__(self, a: float, b: float, values):
        self.a = float(a)
        self.b = float(b)
        self.values = np.asarray(values, dtype=float)
        if self.values.size < 2:
            raise ValueError("need at least two knot values")
        self.knots = np.linspace(self.a, self.b, self.values.size)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0 or (x.ndim == 1 and False)
        xs = np.atleast_1d(x).reshape(-1)
        out = np.interp(xs, self.knots, self.values)
        if np.asarray(x).ndim == 0:
            return float(out[0])
        return out

    def lipschitz_coefficient(self) -> float:
        dx = self.knots[1] - self.knots[0]
        return float(np.max(np.abs(np.diff(self.values))) / dx)

    def sup_bound(self) -> float:
        return float(np.max(np.abs(self.values)))

    def params(self):
        return self.values


class TrigPolyRule:
    """Real trigonometric polynomial a0 + sum_j 2*(Re c_j cos jx - Im c_j sin jx).

    ``coeffs`` is the real parameter vector [a0, Re c_1, Im c_1, ..., Re c_J, Im c_J].
    """

    kind = "trig"

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.size % 2 != 1:
            raise ValueError("coefficient vector must have odd length 2J+1")
        self.J = (self.coeffs.size - 1) // 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.atleast_1d(x).reshape(-1)
        out = trig_features(xs, self.J) @ self.coeffs
        if np.asarray(x).ndim == 0:
            return float(out[0])
        return out

    def strip_sup(self, h: float, samples: int = 1024) -> float:
        """Numerical sup of |analytic continuation| on the strip edge Im z = h."""
        xs = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        c = self.complex_coeffs()
        sup = 0.0
        for sign in (1.0, -1.0):
            val = np.zeros(samples, dtype=complex)
            for j in range(-self.J, self.J + 1):
                val += c[j + self.J] * np.exp(1j * j * (xs + 1j * sign * h))
            sup = max(sup, float(np.max(np.abs(val))))
        return sup

    def complex_coeffs(self) -> np.ndarray:
        """Coefficients c_{-J}..c_J with c_{-j} = conj(c_j)."""
        c = np.zeros(2 * self.J + 1, dtype=complex)
        c[self.J] = self.coeffs[0]
        for j in range(1, self.J + 1):
            cj = self.coeffs[2 * j - 1] + 1j * self.coeffs[2 * j]
            c[self.J + j] = cj
            c[self.J - j] = np.conj(cj)
        return c

    def params(self):
        return self.coeffs


def trig_features(xs: np.ndarray, J: int) -> np.ndarray:
    """Feature matrix [1, 2cos(jx), -2sin(jx)]_{j=1..J} for batch evaluation."""
    cols = [np.ones_like(xs)]
    for j in range(1, J + 1):
        cols.append(2.0 * np.cos(j * xs))
        cols.append(-2.0 * np.sin(j * xs))
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# expert pools (vectorized evaluation of a whole net level)
# ---------------------------------------------------------------------------

class LinearPool:
    def __init__(self, thetas: np.ndarray):
        self.thetas = thetas  # (K, m)

    @property
    def count(self) -> int:
        return self.thetas.shape[0]

    def eval_all(self, x: np.ndarray) -> np.ndarray:
        return self.thetas @ x

    def rule(self, k: int) -> LinearRule:
        return LinearRule(self.thetas[k])

    def param_rows(self):
        return self.thetas


class LipschitzPLPool:
    def __init__(self, a: float, b: float, values: np.ndarray):
        self.a = a
        self.b = b
        self.values = values  # (K, n_knots)
        self.n_knots = values.shape[1]
        self.delta = (b - a) / (self.n_knots - 1)

    @property
    def count(self) -> int:
        return self.values.shape[0]

    def eval_all(self, x: np.ndarray) -> np.ndarray:
        xv = float(x[0]) if np.ndim(x) else float(x)
        s = (xv - self.a) / self.delta
        i = min(max(int(math.floor(s)), 0), self.n_knots - 2)
        w = s - i
        return self.values[:, i] * (1.0 - w) + self.values[:, i + 1] * w

    def rule(self, k: int) -> LipschitzPLRule:
        return LipschitzPLRule(self.a, self.b, self.values[k])

    def param_rows(self):
        return self.values


class TrigPool:
    def __init__(self, coeffs: np.ndarray, J: int):
        self.coeffs = coeffs  # (K, 2J+1) real layout as in TrigPolyRule
        self.J = J

    @property
    def count(self) -> int:
        return self.coeffs.shape[0]

    def eval_all(self, x: np.ndarray) -> np.ndarray:
        xv = float(x[0]) if np.ndim(x) else float(x)
        feat = trig_features(np.array([xv]), self.J)[0]
        return self.coeffs @ feat

    def rule(self, k: int) -> TrigPolyRule:
        return TrigPolyRule(self.coeffs[k])

    def param_rows(self):
        return self.coeffs


@dataclass
class NetLevel:
    class_spec: ClassSpec
    epsilon: float
    pool: object
    entropy_bits: float

    @property
    def count(self) -> int:
        return self.pool.count

    @property
    def experts(self):
        return [self.pool.rule(k) for k in range(self.pool.count)]


# ---------------------------------------------------------------------------
# sizes without materialization
# ---------------------------------------------------------------------------

def _linear_grid_axes(spec: LinearBall, epsilon: float):
    # pitch chosen so the grid is an (epsilon/X2)-net of the theta ball in l2
    q = 2.0 * epsilon / (spec.X2 * math.sqrt(spec.m))
    kmax = int(math.ceil(spec.B / q))
    return q, kmax

def _linear_points(spec: LinearBall, epsilon: float) -> np.ndarray:
    q, kmax = _linear_grid_axes(spec, epsilon)
    axes = [np.arange(-kmax, kmax + 1) * q for _ in range(spec.m)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)
    norms = np.linalg.norm(pts, axis=1)
    margin = q * math.sqrt(spec.m) / 2.0
    inside = norms <= spec.B
    near = (~inside) & (norms <= spec.B + margin)
    projected = pts[near] * (spec.B / norms[near])[:, np.newaxis]
    return np.concatenate([pts[inside], projected], axis=0)


def _lipschitz_layout(spec: LipschitzBall, epsilon: float):
    segments = int(math.ceil(spec.length * spec.c / epsilon))
    first_values = 2 * int(math.floor(spec.bound / epsilon)) + 1
    return segments, first_values


def _disk_lattice_count(radius_over_pitch: float) -> int:
    """Exact number of integer lattice points with k1^2 + k2^2 <= r^2."""
    r = radius_over_pitch
    if r < 0:
        return 0
    kmax = int(math.floor(r))
    total = 0
    r2 = r * r
    for k1 in range(-kmax, kmax + 1):
        rem = r2 - k1 * k1
        if rem < 0:
            continue
        total += 2 * int(math.floor(math.sqrt(rem))) + 1
    return total


def trig_degree(spec: TrigAnalytic, epsilon: float) -> int:
    """Trig-polynomial degree sufficient for a uniform epsilon-approximation.

    The analytic-approximation term gives ceil((1/h) ln(8c/(pi*eps))); for
    slowly decaying coefficient tails the Fourier-truncation requirement
    2c e^{-h(J+1)}/(1-e^{-h}) <= eps can be slightly stronger, so the max
    of the two is used.
    """
    if epsilon >= spec.c:
        return 0
    j_approx = math.ceil(math.log(8.0 * spec.c / (math.pi * epsilon)) / spec.h)
    # smallest J with the truncation tail below epsilon
    tail_target = epsilon * (1.0 - math.exp(-spec.h)) / (2.0 * spec.c)
    j_tail = math.ceil(-math.log(tail_target) / spec.h - 1.0)
    return max(j_approx, j_tail, 0)


def _trig_layout(spec: TrigAnalytic, epsilon: float):
    """Degree, pitch and per-frequency lattice radii for a quantized-Fourier net."""
    J = trig_degree(spec, epsilon)
    if J <= 0:
        return 0, 0.0, []
    pitch = epsilon / (2.0 * (2 * J + 1))
    radii = [spec.c * math.exp(-spec.h * j) for j in range(0, J + 1)]
    return J, pitch, radii


def net_size(spec: ClassSpec, epsilon: float) -> int:
    """Exact expert count of the constructed net, without materializing it."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if isinstance(spec, LinearBall):
        if epsilon >= spec.B * spec.X2:
            return 1
        return _linear_points(spec, epsilon).shape[0]
    if isinstance(spec, LipschitzBall):
        if epsilon >= 2.0 * spec.bound:
            return 1
        segments, first_values = _lipschitz_layout(spec, epsilon)
        return first_values * 3 ** segments
    if isinstance(spec, TrigAnalytic):
        J, pitch, radii = _trig_layout(spec, epsilon)
        if J <= 0:
            return 1
        count = 2 * int(math.floor(radii[0] / pitch)) + 1
        for r in radii[1:]:
            count *= max(_disk_lattice_count(r / pitch), 1)
        return count
    raise TypeError(f"unknown class spec {spec!r}")


def entropy_bits(spec: ClassSpec, epsilon: float) -> float:
    """log2 of the exact expert count.

    Computed in the log domain so astronomically large nets (which could
    never be materialized) still audit correctly.
    """
    if isinstance(spec, LipschitzBall) and epsilon < 2.0 * spec.bound:
        segments, first_values = _lipschitz_layout(spec, epsilon)
        return math.log2(first_values) + segments * math.log2(3.0)
    if isinstance(spec, TrigAnalytic):
        J, pitch, radii = _trig_layout(spec, epsilon)
        if J <= 0:
            return 0.0
        bits = math.log2(2 * math.floor(radii[0] / pitch) + 1)
        for r in radii[1:]:
            bits += math.log2(max(_disk_lattice_count(r / pitch), 1))
        return bits
    return math.log2(net_size(spec, epsilon))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_linear_net(
    spec: LinearBall, epsilon: float, cap: int = DEFAULT_EXPERT_CAP
) -> NetLevel:
    """Uniform grid over the coefficient ball; covering factor 1.

    Grid pitch 2*eps/(X2*sqrt(m)) keeps any theta within eps/X2 in l2 of a
    grid point, hence within eps in sup norm over the signal ball; grid
    points slightly outside the coefficient ball are projected onto it.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if epsilon >= spec.B * spec.X2:
        pts = np.zeros((1, spec.m))
    else:
        n = net_size(spec, epsilon)
        if n > cap:
            raise NetTooLargeError(n, cap, f"linear net at eps={epsilon}")
        pts = _linear_points(spec, epsilon)
    return NetLevel(spec, epsilon, LinearPool(pts), math.log2(pts.shape[0]))


def build_lipschitz_net(
    spec: LipschitzBall, epsilon: float, cap: int = DEFAULT_EXPERT_CAP
) -> NetLevel:
    """Quantized piecewise-linear paths; covering factor 2.

    Knot spacing eps/c; knot values are multiples of eps inside
    [-bound, bound]; adjacent values differ by at most one quantum, and
    paths are clamped at the bound (clamping keeps them c-Lipschitz).
    Experts enumerate {first value} x {difference digits}, base-3.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if epsilon >= 2.0 * spec.bound:
        vals = np.zeros((1, 2))
        return NetLevel(spec, epsilon, LipschitzPLPool(spec.a, spec.b, vals), 0.0)
    n = net_size(spec, epsilon)
    if n > cap:
        raise NetTooLargeError(n, cap, f"lipschitz net at eps={epsilon}")
    segments, first_values = _lipschitz_layout(spec, epsilon)
    v0 = (np.arange(first_values) - first_values // 2) * epsilon
    ids = np.arange(n)
    values = np.empty((n, segments + 1))
    values[:, 0] = v0[ids // 3 ** segments]
    rem = ids % 3 ** segments
    for s in range(segments):
        digit = (rem // 3 ** (segments - 1 - s)) % 3  # 0,1,2 -> -eps,0,+eps
        values[:, s + 1] = np.clip(
            values[:, s] + (digit - 1) * epsilon, -spec.bound, spec.bound
        )
    return NetLevel(
        spec, epsilon, LipschitzPLPool(spec.a, spec.b, values), math.log2(n)
    )


def _disk_lattice_points(radius_over_pitch: float) -> np.ndarray:
    r = radius_over_pitch
    kmax = int(math.floor(r))
    ks = np.arange(-kmax, kmax + 1)
    g1, g2 = np.meshgrid(ks, ks, indexing="ij")
    pts = np.stack([g1.reshape(-1), g2.reshape(-1)], axis=1)
    keep = (pts[:, 0] ** 2 + pts[:, 1] ** 2) <= r * r
    return pts[keep]


def build_trig_net(
    spec: TrigAnalytic,
    epsilon: float,
    cap: int = DEFAULT_EXPERT_CAP,
    allow_trivial_fallback: bool = True,
) -> NetLevel:
    """Lattice-quantized Fourier coefficients inside decay disks; factor 2.

    Degree from :func:`trig_degree`; every complex coefficient is
    quantized with pitch eps/(2*(2J+1)) inside the disk of radius
    c*exp(-h*j).  When the resulting product grid is over the cap but the
    zero polynomial alone is a valid factor-2 cover (c <= 2*eps), that
    one-expert net is returned instead; otherwise NetTooLargeError.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    J, pitch, radii = _trig_layout(spec, epsilon)
    if J <= 0:
        return NetLevel(spec, epsilon, TrigPool(np.zeros((1, 1)), 0), 0.0)
    n = net_size(spec, epsilon)
    if n > cap:
        if allow_trivial_fallback and spec.c <= 2.0 * epsilon:
            return NetLevel(spec, epsilon, TrigPool(np.zeros((1, 1)), 0), 0.0)
        raise NetTooLargeError(n, cap, f"trig net at eps={epsilon}")
    axis0 = (
        np.arange(-int(math.floor(radii[0] / pitch)), int(math.floor(radii[0] / pitch)) + 1)
        * pitch
    )
    freq_grids = [_disk_lattice_points(radii[j] / pitch) * pitch for j in range(1, J + 1)]
    dims = (axis0.size,) + tuple(max(g.shape[0], 1) for g in freq_grids)
    ids = np.arange(n)
    digits = np.unravel_index(ids, dims)
    coeffs = np.empty((n, 2 * J + 1))
    coeffs[:, 0] = axis0[digits[0]]
    for j in range(1, J + 1):
        g = freq_grids[j - 1]
        if g.shape[0] == 0:
            g = np.zeros((1, 2))
        coeffs[:, 2 * j - 1] = g[digits[j], 0]
        coeffs[:, 2 * j] = g[digits[j], 1]
    return NetLevel(spec, epsilon, TrigPool(coeffs, J), math.log2(n))


def build_net(spec: ClassSpec, epsilon: float, cap: int = DEFAULT_EXPERT_CAP) -> NetLevel:
    if isinstance(spec, LinearBall):
        return build_linear_net(spec, epsilon, cap)
    if isinstance(spec, LipschitzBall):
        return build_lipschitz_net(spec, epsilon, cap)
    if isinstance(spec, TrigAnalytic):
        return build_trig_net(spec, epsilon, cap)
    raise TypeError(f"unknown class spec {spec!r}")


def dyadic_net_family(
    spec: ClassSpec, i_max: int, cap: int = DEFAULT_EXPERT_CAP
) -> list[NetLevel]:
    """Levels with epsilon = 2^-i for i = 1..i_max, jointly under the cap."""
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    totals = 0
    feasible = 0
    sizes = []
    for i in range(1, i_max + 1):
        eps = 2.0 ** -i
        n = net_size(spec, eps)
        if isinstance(spec, TrigAnalytic) and n > cap and spec.c <= 2.0 * eps:
            n = 1  # trivial-fallback level
        sizes.append(n)
        totals += n
        if totals <= cap:
            feasible = i
    if totals > cap:
        raise NetTooLargeError(
            totals, cap, f"dyadic family i_max={i_max}; largest feasible i_max={feasible}"
        )
    levels = [build_net(spec, 2.0 ** -i, cap) for i in range(1, i_max + 1)]
    counts = [lvl.count for lvl in levels]
    if any(counts[i] < counts[i - 1] for i in range(1, len(counts))):
        raise AssertionError(f"level counts not nondecreasing: {counts}")
    return levels


# ---------------------------------------------------------------------------
# random class members, covering candidates, signal sampling
# ---------------------------------------------------------------------------

def eval_member(rule, xs: np.ndarray) -> np.ndarray:
    """Batch-evaluate a prediction rule on signals of shape (n, m)."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, np.newaxis]
    if getattr(rule, "kind", None) == "linear":
        return np.asarray(rule(xs))
    return np.asarray(rule(xs[:, 0]))


def signal_sample(spec: ClassSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """n signals drawn uniformly from the class's signal space, shape (n, m)."""
    if isinstance(spec, LinearBall):
        # uniform in the l2 ball of radius X2
        g = rng.standard_normal((n, spec.m))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = spec.X2 * rng.uniform(0.0, 1.0, size=n) ** (1.0 / spec.m)
        return g * r[:, np.newaxis]
    if isinstance(spec, LipschitzBall):
        return rng.uniform(spec.a, spec.b, size=(n, 1))
    if isinstance(spec, TrigAnalytic):
        return rng.uniform(0.0, 2 * np.pi, size=(n, 1))
    raise TypeError(f"unknown class spec {spec!r}")


def random_member(spec: ClassSpec, rng: np.random.Generator, norm_fraction=None):
    """Draw a random member of the class ball (used by oracles and generators).

    ``norm_fraction`` in (0, 1] pins the member's class norm to that
    fraction of the ball radius; default draws it uniformly.
    """
    u = float(rng.uniform(0.05, 1.0)) if norm_fraction is None else float(norm_fraction)
    if isinstance(spec, LinearBall):
        g = rng.standard_normal(spec.m)
        g /= np.linalg.norm(g)
        return LinearRule(g * spec.B * u)
    if isinstance(spec, LipschitzBall):
        n = 257
        dx = spec.length / (n - 1)
        c = spec.c * u
        vals = np.empty(n)
        vals[0] = rng.uniform(-spec.bound * u, spec.bound * u)
        steps = rng.uniform(-c * dx, c * dx, size=n - 1)
        for i in range(1, n):
            vals[i] = np.clip(vals[i - 1] + steps[i - 1], -spec.bound, spec.bound)
        return LipschitzPLRule(spec.a, spec.b, vals)
    if isinstance(spec, TrigAnalytic):
        # draw decayed coefficients, then normalize the strip sup to u*c
        J = max(trig_degree(spec, 1e-3 * spec.c), 2)
        raw = np.empty(2 * J + 1)
        raw[0] = rng.uniform(-1.0, 1.0) * spec.c
        for j in range(1, J + 1):
            r = spec.c * math.exp(-spec.h * j) * math.sqrt(rng.uniform(0.0, 1.0))
            phase = rng.uniform(0.0, 2 * np.pi)
            raw[2 * j - 1] = r * math.cos(phase)
            raw[2 * j] = r * math.sin(phase)
        rule = TrigPolyRule(raw)
        sup = rule.strip_sup(spec.h)
        if sup <= 0:
            return TrigPolyRule(np.zeros(3))
        return TrigPolyRule(raw * (u * spec.c / sup))
    raise TypeError(f"unknown class spec {spec!r}")


def _lipschitz_quantize(level: NetLevel, member) -> int:
    """Index of a net expert tracking the member's knot values greedily."""
    spec: LipschitzBall = level.class_spec
    eps = level.epsilon
    pool: LipschitzPLPool = level.pool
    knots = np.linspace(spec.a, spec.b, pool.n_knots)
    f = np.asarray(member(knots), dtype=float)
    segments = pool.n_knots - 1
    first_values = 2 * int(math.floor(spec.bound / eps)) + 1
    half = first_values // 2
    k0 = int(np.clip(round(f[0] / eps), -half, half))
    v = k0 * eps
    v0_index = k0 + half
    digits = []
    for s in range(1, pool.n_knots):
        best = min(
            (0, 1, 2),
            key=lambda d: abs(
                np.clip(v + (d - 1) * eps, -spec.bound, spec.bound) - f[s]
            ),
        )
        digits.append(best)
        v = np.clip(v + (best - 1) * eps, -spec.bound, spec.bound)
    idx = v0_index
    for d in digits:
        idx = idx * 3 + d
    return idx


def _trig_quantize(level: NetLevel, member: TrigPolyRule) -> int:
    """Index of the net expert whose lattice coefficients track the member's."""
    spec: TrigAnalytic = level.class_spec
    J, pitch, radii = _trig_layout(spec, level.epsilon)
    pool: TrigPool = level.pool
    if pool.J == 0:
        return 0
    # member's Fourier coefficients up to degree J
    mc = np.zeros(2 * J + 1)
    src = member.coeffs
    upto = min(member.J, J)
    mc[0] = src[0]
    mc[1 : 2 * upto + 1] = src[1 : 2 * upto + 1]

    k0max = int(math.floor(radii[0] / pitch))
    k0 = int(np.clip(round(mc[0] / pitch), -k0max, k0max))
    dims = []
    digits = []
    axis_len = 2 * k0max + 1
    digits.append(k0 + k0max)
    dims.append(axis_len)
    for j in range(1, J + 1):
        g = _disk_lattice_points(radii[j] / pitch)
        if g.shape[0] == 0:
            g = np.zeros((1, 2), dtype=int)
        target = np.array([mc[2 * j - 1], mc[2 * j]]) / pitch
        d2 = (g[:, 0] - target[0]) ** 2 + (g[:, 1] - target[1]) ** 2
        digits.append(int(np.argmin(d2)))
        dims.append(g.shape[0])
    return int(np.ravel_multi_index(tuple(digits), tuple(dims)))


def nearest_candidate(level: NetLevel, member, sample_points: np.ndarray):
    """(expert_id, sampled sup distance) for a constructively nearest expert.

    For linear nets this is the true minimizer over the whole level; for
    the nonlinear kinds it is the quantization candidate, which witnesses
    the covering property without an exhaustive scan.
    """
    spec = level.class_spec
    if isinstance(spec, LinearBall):
        pool: LinearPool = level.pool
        theta = np.atleast_1d(member.theta)
        d = np.linalg.norm(pool.thetas - theta[np.newaxis, :], axis=1)
        k = int(np.argmin(d))
        return k, float(d[k] * spec.X2)
    if isinstance(spec, LipschitzBall):
        k = _lipschitz_quantize(level, member)
    elif isinstance(spec, TrigAnalytic):
        if level.pool.J == 0 and level.pool.count == 1:
            k = 0
        else:
            k = _trig_quantize(level, member)
    else:
        raise TypeError(f"unknown class spec {spec!r}")
    rule = level.pool.rule(k)
    xs = sample_points.reshape(-1)
    return k, float(np.max(np.abs(np.asarray(rule(xs)) - np.asarray(member(xs)))))


def write_net_csv(levels, path) -> None:
    """Audit dump: one row per expert (expert_id, kind, epsilon, parameters)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["expert_id", "kind", "epsilon", "params"])
        eid = 0
        for lvl in levels:
            for row in lvl.pool.param_rows():
                w.writerow(
                    [eid, lvl.class_spec.kind, repr(lvl.epsilon),
                     ";".join(repr(float(v)) for v in np.atleast_1d(row))]
                )
                eid += 1
