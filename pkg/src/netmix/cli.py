"""Command-line entry points.

Subcommands: ``run <config-file>`` (YAML experiment config), ``verify``
(certificate suite), ``bench`` (exponent-fit suite), ``nets <spec>``
(net audit dump).  Exit code is nonzero iff any VIOLATION verdict.
"""

from __future__ import annotations

import sys

import click
import yaml

from . import harness, nets, presets


def _spec_from_string(text: str):
    """Parse e.g. 'linear:m=2,B=1' or 'trig:h=0.5' into a class spec."""
    kind, _, rest = text.partition(":")
    d = {"kind": kind.strip()}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            d[key.strip()] = float(val)
    return harness.class_spec_from_dict(d)


@click.group()
def main():
    """Competitive on-line regression toolkit."""


@main.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--outdir", default="out", show_default=True,
              help="Directory for CSV and figure output.")
def run(config_file, outdir):
    """Run the experiment described by a YAML config file."""
    with open(config_file) as f:
        config = harness.ExperimentConfig.from_dict(yaml.safe_load(f))
    result = harness.run_experiment(config, outdir)
    for row in result["fits"]:
        click.echo(f"{row['strategy']}: exponent={row['exponent']:.3f} "
                   f"r2={row['r2']:.3f}")
    if result["violations"]:
        click.echo(f"{result['violations']} VIOLATION verdict(s)", err=True)
        sys.exit(1)
    click.echo("all certificates held")


@main.command()
@click.option("--outdir", default="out/verify", show_default=True)
def verify(outdir):
    """Run the certificate-verification suite over all preset classes."""
    violations = 0
    for config in presets.verify_configs():
        result = harness.run_experiment(config, f"{outdir}/{config.name}")
        violations += result["violations"]
        click.echo(f"{config.name}: {len(result['regret'])} verdicts, "
                   f"{result['violations']} violations")
    if violations:
        click.echo(f"{violations} VIOLATION verdict(s)", err=True)
        sys.exit(1)
    click.echo("all certificates held")


@main.command()
@click.option("--outdir", default="out/bench", show_default=True)
def bench(outdir):
    """Run the exponent-fit benchmark suite (tens of minutes)."""
    config = presets.bench_config()
    result = harness.run_experiment(config, outdir)
    for row in result["fits"]:
        click.echo(f"{row['strategy']}: exponent={row['exponent']:.3f} "
                   f"r2={row['r2']:.3f} "
                   f"regret@{max(config.N_list)}={row['mean_regret_at_max_N']:.2f}")
    if result["violations"]:
        click.echo(f"{result['violations']} VIOLATION verdict(s)", err=True)
        sys.exit(1)


@main.command(name="nets")
@click.argument("spec")
@click.option("--epsilon", default=0.25, show_default=True)
@click.option("--out", "out_path", default="nets.csv", show_default=True)
def nets_cmd(spec, epsilon, out_path):
    """Dump a net audit CSV for a class spec like 'linear:m=1,B=1'."""
    class_spec = _spec_from_string(spec)
    count = nets.net_size(class_spec, epsilon)
    bits = nets.entropy_bits(class_spec, epsilon)
    click.echo(f"{spec} @ eps={epsilon}: {count} experts "
               f"({bits:.1f} bits)")
    level = nets.build_net(class_spec, epsilon)
    nets.write_net_csv([level], out_path)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
