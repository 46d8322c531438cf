"""Experiment runner: data generators, regret measurement, certificate
verification, exponent fitting, and CSV/figure reporting.

All randomness flows from one seedable generator; per-replicate streams
are split deterministically with ``np.random.SeedSequence.spawn``, so a
fixed config yields byte-identical outputs.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from . import nets, oracles, strategies
from .nets import ClassSpec, LinearBall, LipschitzBall, TrigAnalytic
from .protocol import run_protocol, write_rounds_csv

__all__ = [
    "ExperimentConfig",
    "StrategyBlock",
    "class_spec_from_dict",
    "generate_sequence",
    "build_strategy",
    "run_experiment",
    "domination_experiment",
]

CERT_TOLERANCE = 1e-6


def class_spec_from_dict(d: dict) -> ClassSpec:
    kind = d["kind"]
    if kind == "linear":
        return LinearBall(int(d.get("m", 1)), float(d.get("X2", 1.0)),
                          float(d.get("B", 1.0)))
    if kind == "lipschitz":
        return LipschitzBall(float(d.get("a", 0.0)), float(d.get("b", 1.0)),
                             float(d.get("c", 1.0)), float(d.get("bound", 1.0)))
    if kind == "trig":
        return TrigAnalytic(float(d.get("h", 1.0)), float(d.get("c", 1.0)))
    raise ValueError(f"unknown class kind {kind!r}")


@dataclass
class StrategyBlock:
    name: str
    class_spec: ClassSpec
    strategy: str = "compact"       # compact | banach | aar
    i_max: int = 3
    j_max: int = 1
    eta: float | None = None
    cap: int = nets.DEFAULT_EXPERT_CAP
    target_class: ClassSpec | None = None       # defaults to class_spec
    target_norm_fraction: float | None = 0.9
    target_radius_factor: float = 1.0           # >1 exercises Banach shells

    @classmethod
    def from_dict(cls, d: dict) -> "StrategyBlock":
        return cls(
            name=d["name"],
            class_spec=class_spec_from_dict(d["class"]),
            strategy=d.get("strategy", "compact"),
            i_max=int(d.get("i_max", 3)),
            j_max=int(d.get("j_max", 1)),
            eta=d.get("eta"),
            cap=int(d.get("cap", nets.DEFAULT_EXPERT_CAP)),
            target_class=(
                class_spec_from_dict(d["target_class"])
                if "target_class" in d else None
            ),
            target_norm_fraction=d.get("target_norm_fraction", 0.9),
            target_radius_factor=float(d.get("target_radius_factor", 1.0)),
        )


@dataclass
class ExperimentConfig:
    name: str
    seed: int
    N_list: list[int]
    replicates: int
    blocks: list[StrategyBlock]
    Y: float = 1.0
    generator: str = "realizable"   # realizable | noisy | adversarial_switching
    sigma: float = 0.0
    switch_every: int = 64
    write_figures: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        n_list = sorted(int(n) for n in d["N_list"])
        if any(n <= 0 for n in n_list):
            raise ValueError("horizons must be positive")
        return cls(
            name=d.get("name", "experiment"),
            seed=int(d["seed"]),
            N_list=n_list,
            replicates=int(d.get("replicates", 1)),
            blocks=[StrategyBlock.from_dict(b) for b in d["strategies"]],
            Y=float(d.get("Y", 1.0)),
            generator=d.get("generator", "realizable"),
            sigma=float(d.get("sigma", 0.0)),
            switch_every=int(d.get("switch_every", 64)),
            write_figures=bool(d.get("write_figures", True)),
        )


def generate_sequence(
    spec: ClassSpec,
    N: int,
    rng: np.random.Generator,
    generator: str = "realizable",
    sigma: float = 0.0,
    Y: float = 1.0,
    norm_fraction: float | None = 0.9,
    radius_factor: float = 1.0,
    switch_every: int = 64,
):
    """Data from a hidden in-class target: y_n = clip(F(x_n) + noise).

    Returns (data, targets): ``targets`` holds one rule for realizable /
    noisy generators and two for adversarial_switching.  For
    ``radius_factor`` > 1 the hidden target is drawn from the scaled
    class ball (Banach-shell experiments).
    """
    draw_spec = spec.scaled(radius_factor) if radius_factor != 1.0 else spec
    xs = nets.signal_sample(spec, rng, N)
    if generator == "adversarial_switching":
        targets = [nets.random_member(draw_spec, rng, norm_fraction),
                   nets.random_member(draw_spec, rng, norm_fraction)]
        which = (np.arange(N) // switch_every) % 2
        f = np.where(
            which == 0,
            nets.eval_member(targets[0], xs),
            nets.eval_member(targets[1], xs),
        )
    elif generator in ("realizable", "noisy"):
        targets = [nets.random_member(draw_spec, rng, norm_fraction)]
        f = nets.eval_member(targets[0], xs)
    else:
        raise ValueError(f"unknown generator {generator!r}")
    noise = sigma * rng.standard_normal(N) if sigma > 0 else 0.0
    ys = np.clip(f + noise, -Y, Y)
    data = [(xs[i], np.array([ys[i]])) for i in range(N)]
    return data, targets


def build_strategy(block: StrategyBlock, Y: float):
    if block.strategy == "compact":
        return strategies.make_compact_strategy(
            block.class_spec, block.i_max, Y, block.eta, block.cap
        )
    if block.strategy == "banach":
        return strategies.make_banach_strategy(
            block.class_spec, block.i_max, block.j_max, Y, block.eta, block.cap
        )
    if block.strategy == "aar":
        return strategies.AAR(block.class_spec.m)
    raise ValueError(f"unknown strategy kind {block.strategy!r}")


def _target_cum_losses(targets, data, switch_every: int):
    xs = np.stack([np.atleast_1d(x) for x, _ in data])
    ys = np.array([float(np.asarray(y).reshape(-1)[0]) for _, y in data])
    if len(targets) == 1:
        f = nets.eval_member(targets[0], xs)
    else:
        which = (np.arange(len(data)) // switch_every) % 2
        f = np.where(which == 0, nets.eval_member(targets[0], xs),
                     nets.eval_member(targets[1], xs))
    return np.cumsum((ys - f) ** 2)


def _fmt(v) -> str:
    return repr(float(v))


def run_experiment(config: ExperimentConfig, outdir: str) -> dict:
    """Run every strategy block over every horizon and replicate.

    Emits regret.csv, fits.csv, nets.csv, rounds.csv and (unless disabled)
    a regret-vs-horizon figure.  Returns a summary dict with the regret
    rows, fit rows, and the total VIOLATION count.
    """
    os.makedirs(outdir, exist_ok=True)
    n_max = max(config.N_list)
    regret_rows = []
    fit_rows = []
    violations = 0

    ss = np.random.SeedSequence(config.seed)
    block_seeds = ss.spawn(len(config.blocks))

    net_levels_for_audit = []
    for b_idx, block in enumerate(config.blocks):
        rep_seeds = block_seeds[b_idx].spawn(config.replicates)
        per_rep_regrets = np.zeros((config.replicates, len(config.N_list)))
        for rep in range(config.replicates):
            rng = np.random.default_rng(rep_seeds[rep])
            data, targets = generate_sequence(
                block.target_class or block.class_spec,
                n_max,
                rng,
                generator=config.generator,
                sigma=config.sigma,
                Y=config.Y,
                norm_fraction=block.target_norm_fraction,
                radius_factor=block.target_radius_factor,
                switch_every=config.switch_every,
            )
            strat = build_strategy(block, config.Y)
            records = run_protocol(strat, data, n_max, Y=config.Y)
            target_cum = _target_cum_losses(targets, data, config.switch_every)
            if rep == 0:
                write_rounds_csv(records, os.path.join(
                    outdir, f"rounds_{block.name}.csv"))
                if hasattr(strat, "levels"):
                    net_levels_for_audit.extend(strat.levels)
            in_class = (
                block.target_class is None
                and len(targets) == 1
                and block.strategy in ("compact", "banach")
            )
            for n_idx, N in enumerate(config.N_list):
                regret = records[N - 1].cum_loss - float(target_cum[N - 1])
                per_rep_regrets[rep, n_idx] = regret
                cert = math.nan
                verdict = "REPORT_ONLY"
                if in_class:
                    cert = strategies.min_certificate(strat, targets[0], N)
                    verdict = (
                        "CERTIFIED" if regret <= cert + CERT_TOLERANCE
                        else "VIOLATION"
                    )
                    if verdict == "VIOLATION":
                        violations += 1
                regret_rows.append({
                    "strategy": block.name, "N": N, "replicate": rep,
                    "regret": regret, "certificate": cert, "verdict": verdict,
                })
        mean_regret = per_rep_regrets.mean(axis=0)
        exponent, r2 = oracles.fit_exponent(config.N_list, mean_regret)
        fit_rows.append({
            "strategy": block.name, "exponent": exponent, "r2": r2,
            "mean_regret_at_max_N": float(mean_regret[-1]),
        })

    with open(os.path.join(outdir, "regret.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["strategy", "N", "replicate", "regret", "certificate",
                    "verdict"])
        for r in regret_rows:
            w.writerow([r["strategy"], r["N"], r["replicate"],
                        _fmt(r["regret"]),
                        "" if math.isnan(r["certificate"]) else _fmt(r["certificate"]),
                        r["verdict"]])
    with open(os.path.join(outdir, "fits.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["strategy", "exponent", "r2", "mean_regret_at_max_N"])
        for r in fit_rows:
            w.writerow([r["strategy"], _fmt(r["exponent"]), _fmt(r["r2"]),
                        _fmt(r["mean_regret_at_max_N"])])
    if net_levels_for_audit:
        small = [lvl for lvl in net_levels_for_audit if lvl.count <= 10_000]
        if small:
            nets.write_net_csv(small, os.path.join(outdir, "nets.csv"))

    if config.write_figures:
        from .plots import plot_regret_curves
        plot_regret_curves(
            config.N_list, regret_rows, fit_rows,
            os.path.join(outdir, f"{config.name}_regret.png"),
            title=config.name,
        )

    return {"regret": regret_rows, "fits": fit_rows, "violations": violations}


def domination_experiment(
    strategy_block: StrategyBlock,
    target_spec: ClassSpec,
    config: ExperimentConfig,
    outdir: str,
) -> dict:
    """Run a strategy built for one class against targets from another.

    Report-only: realized regret of the mismatched strategy, the matched
    strategy's regret on the same data, and their ratio.  Cumulative
    losses are checked monotone; no threshold is asserted.
    """
    os.makedirs(outdir, exist_ok=True)
    n_max = max(config.N_list)
    matched_block = StrategyBlock(
        name=f"matched-{strategy_block.name}",
        class_spec=target_spec,
        strategy="compact",
        i_max=strategy_block.i_max,
        eta=strategy_block.eta,
        cap=strategy_block.cap,
    )
    rows = []
    ss = np.random.SeedSequence(config.seed)
    rep_seeds = ss.spawn(config.replicates)
    for rep in range(config.replicates):
        rng = np.random.default_rng(rep_seeds[rep])
        data, targets = generate_sequence(
            target_spec, n_max, rng,
            generator=config.generator, sigma=config.sigma, Y=config.Y,
            norm_fraction=strategy_block.target_norm_fraction,
        )
        target_cum = _target_cum_losses(targets, data, config.switch_every)
        cross = build_strategy(strategy_block, config.Y)
        cross_rec = run_protocol(cross, data, n_max, Y=config.Y)
        matched = build_strategy(matched_block, config.Y)
        matched_rec = run_protocol(matched, data, n_max, Y=config.Y)
        for N in config.N_list:
            cross_regret = cross_rec[N - 1].cum_loss - float(target_cum[N - 1])
            matched_regret = matched_rec[N - 1].cum_loss - float(target_cum[N - 1])
            denom = matched_regret if abs(matched_regret) > 1e-12 else math.nan
            rows.append({
                "strategy": strategy_block.name, "N": N, "replicate": rep,
                "cross_regret": cross_regret,
                "matched_regret": matched_regret,
                "ratio": cross_regret / denom if denom == denom else math.nan,
            })
    with open(os.path.join(outdir, "domination.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["strategy", "N", "replicate", "cross_regret",
                    "matched_regret", "ratio"])
        for r in rows:
            w.writerow([r["strategy"], r["N"], r["replicate"],
                        _fmt(r["cross_regret"]), _fmt(r["matched_regret"]),
                        _fmt(r["ratio"]) if r["ratio"] == r["ratio"] else ""])
    return {"rows": rows}
