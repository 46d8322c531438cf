"""Canned experiment configurations for the verification and benchmark suites.

``verify_configs`` covers every benchmark class with in-class targets so
the certificate verdicts are exercised end to end; ``bench_config`` is
the longer exponent-fit suite over dyadic horizons.
"""

from __future__ import annotations

from .harness import ExperimentConfig

__all__ = ["verify_configs", "bench_config", "nets_audit_specs"]

VERIFY_SEED = 20240901
BENCH_SEED = 20241001


def verify_configs() -> list[ExperimentConfig]:
    """Certificate-verification suite: one config per data regime.

    Every block uses an in-class hidden target so each (strategy, N,
    replicate) row carries a CERTIFIED / VIOLATION verdict.
    """
    blocks = [
        {"name": "linear-m1", "class": {"kind": "linear", "m": 1},
         "strategy": "compact", "i_max": 6},
        {"name": "linear-m2", "class": {"kind": "linear", "m": 2},
         "strategy": "compact", "i_max": 3},
        {"name": "lipschitz-c1", "class": {"kind": "lipschitz", "c": 1.0},
         "strategy": "compact", "i_max": 3},
        {"name": "lipschitz-c2", "class": {"kind": "lipschitz", "c": 2.0},
         "strategy": "compact", "i_max": 2},
        {"name": "trig-h05", "class": {"kind": "trig", "h": 0.5},
         "strategy": "compact", "i_max": 1},
        {"name": "trig-h1", "class": {"kind": "trig", "h": 1.0},
         "strategy": "compact", "i_max": 1},
        {"name": "banach-linear-m1",
         "class": {"kind": "linear", "m": 1},
         "strategy": "banach", "i_max": 5, "j_max": 2,
         "target_radius_factor": 2.0},
        {"name": "banach-lipschitz-c1",
         "class": {"kind": "lipschitz", "c": 1.0},
         "strategy": "banach", "i_max": 1, "j_max": 2,
         "target_radius_factor": 2.0},
    ]
    realizable = ExperimentConfig.from_dict({
        "name": "verify-realizable",
        "seed": VERIFY_SEED,
        "N_list": [128, 256, 512],
        "replicates": 3,
        "strategies": blocks,
        "generator": "realizable",
        "sigma": 0.0,
    })
    noisy = ExperimentConfig.from_dict({
        "name": "verify-noisy",
        "seed": VERIFY_SEED + 1,
        "N_list": [128, 256, 512],
        "replicates": 3,
        "strategies": [b for b in blocks if b["strategy"] == "compact"],
        "generator": "noisy",
        "sigma": 0.1,
    })
    return [realizable, noisy]


def bench_config() -> ExperimentConfig:
    """Exponent-fit suite: dyadic horizons 2^8..2^14, 10 replicates."""
    return ExperimentConfig.from_dict({
        "name": "bench",
        "seed": BENCH_SEED,
        "N_list": [2 ** k for k in range(8, 15)],
        "replicates": 10,
        "strategies": [
            {"name": "linear-m1", "class": {"kind": "linear", "m": 1},
             "strategy": "aar"},
            {"name": "lipschitz-c1", "class": {"kind": "lipschitz", "c": 1.0},
             "strategy": "compact", "i_max": 3},
            {"name": "trig-h7", "class": {"kind": "trig", "h": 7.0},
             "strategy": "compact", "i_max": 6, "eta": 1.0 / 32.0},
        ],
        "generator": "noisy",
        "sigma": 0.1,
    })


def nets_audit_specs() -> list[dict]:
    """Class specs used by the entropy-shape audit."""
    return [
        {"kind": "lipschitz", "c": 1.0},
        {"kind": "trig", "h": 1.0},
        {"kind": "trig", "h": 2.0},
    ]
