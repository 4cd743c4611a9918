"""Command-line driver.

Exit codes: 0 success, 2 invalid configuration (the diagnostic names the
field), 3 integrator divergence.
"""
from __future__ import annotations

import functools
import sys

import click

from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_benchmark,
    run_dump_propagator,
    run_min_l,
    run_simulate,
    run_table_a,
    run_validate,
)
from .propagator import DivergenceError


def _parse_params(pairs: tuple[str, ...]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError("params", f"expected key=value, got {pair!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value.strip()
    return out


def _build_config(config_path, **flags) -> ExperimentConfig:
    params = _parse_params(flags.pop("param", ()) or ())
    overrides = {k: v for k, v in flags.items() if v is not None}
    if params:
        overrides["params"] = params
    if config_path:
        return ExperimentConfig.from_file(config_path, **overrides)
    return ExperimentConfig(**overrides)


def common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True), help="JSON config file; flags override its fields."),
        click.option("--model", type=str, help="ou | gbm | logistic | protein"),
        click.option("--param", multiple=True, help="Model parameter, e.g. --param a=0.5 --param sigma=1"),
        click.option("--eta", type=float, help="Start value."),
        click.option("--theta", type=float, help="End value."),
        click.option("--T", "T", type=float, help="Horizon."),
        click.option("--x0", type=float, help="Initial state of the unconditioned diffusion (default: eta)."),
        click.option("--p", type=int, help="Chaos order bound (default 12)."),
        click.option("--L", "L", type=int, help="Number of retained basis functions."),
        click.option("--grid", type=int, help="Time steps (default 1000)."),
        click.option("--paths", "n_paths", type=int, help="Monte Carlo paths (default 1000)."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--scheme", type=str, help="Index scheme: table-a | full"),
        click.option("--baseline", type=str, help="exact-ou | doob-h | bladt-sorensen"),
        click.option("--eval-time", "eval_time", type=float, help="Marginal evaluation time (default T/2)."),
        click.option("--solver", type=str, help="rk4 | rk45 | exact-ou"),
        click.option("--bridge-mode", "bridge_mode", type=str, help="guided | integral"),
        click.option("--threads", type=int, help="Worker cap for path sampling."),
        click.option("--out", type=click.Path(), help="Output directory."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"configuration error in {exc}", err=True)
            sys.exit(2)
        except DivergenceError as exc:
            click.echo(f"integration diverged: {exc}", err=True)
            sys.exit(3)

    return wrapper


@click.group()
@click.version_option()
def main():
    """Simulate diffusion bridges by truncated chaos expansion and validate
    them against reference samplers."""


@main.command()
@common_options
@click.option("--binary", is_flag=True, help="Also write the compact binary path dump.")
@handles_errors
def simulate(config_path, binary, **flags):
    """Sample pinned bridge paths; write paths.csv and summary.json."""
    cfg = _build_config(config_path, **flags)
    result = run_simulate(cfg, write_binary=binary)
    s = result.summary
    click.echo(
        f"{cfg.model} bridge ({cfg.eta} -> {cfg.theta}), L={cfg.L}: "
        f"{cfg.n_paths} paths, marginal mean {s['marginal_mean']:.6g}, "
        f"variance {s['marginal_variance']:.6g} at t={s['eval_time']:.6g}"
    )
    if cfg.out:
        click.echo(f"wrote {cfg.out}/paths.csv, {cfg.out}/summary.json")


@main.command()
@common_options
@handles_errors
def validate(config_path, **flags):
    """Compare the chaos sampler against a baseline; write ks.json, qq.json."""
    cfg = _build_config(config_path, **flags)
    if cfg.baseline is None:
        raise ConfigError("baseline", "validate requires --baseline")
    result = run_validate(cfg)
    ks = result.ks
    click.echo(
        f"{ks['comparison']} ({cfg.eta} -> {cfg.theta}), L={cfg.L}: "
        f"d={ks['d']:.4f} p={ks['p_value']:.4g} (n={ks['n']}, m={ks['m']})"
    )
    if cfg.out:
        click.echo(f"wrote {cfg.out}/ks.json, {cfg.out}/qq.json, {cfg.out}/marginals.csv")


@main.command("min-l")
@common_options
@click.option("--ladder", default="5,10,25,50,100", show_default=True, help="Comma-separated increasing truncations.")
@click.option("--threshold", default=0.05, show_default=True, type=float)
@click.option("--repetitions", default=5, show_default=True, type=int)
@handles_errors
def min_l(config_path, ladder, threshold, repetitions, **flags):
    """Smallest truncation whose median validation p-value clears the threshold."""
    cfg = _build_config(config_path, **flags)
    if cfg.baseline is None:
        raise ConfigError("baseline", "min-l requires --baseline")
    steps = [int(x) for x in ladder.split(",") if x.strip()]
    report = run_min_l(cfg, steps, threshold=threshold, repetitions=repetitions)
    for row in report["results"]:
        click.echo(f"L={row['L']:>6}: median p = {row['median_p']:.4g}")
    if report["min_l"] is None:
        click.echo(f"no ladder value reached p > {threshold}")
    else:
        click.echo(f"minimal L = {report['min_l']}")


@main.command()
@common_options
@click.option("--l-values", "l_values", default="100,1000,10000", show_default=True)
@click.option("--paths-timed", "paths_timed", type=int, help="Paths to time individually (default --paths).")
@handles_errors
def benchmark(config_path, l_values, paths_timed, **flags):
    """Per-truncation construction and per-bridge sampling times."""
    cfg = _build_config(config_path, **flags)
    steps = [int(x) for x in l_values.split(",") if x.strip()]
    report = run_benchmark(cfg, steps, paths_timed=paths_timed)
    for row in report["rows"]:
        click.echo(
            f"L={row['L']:>6}: solve {row['solve_seconds']:.6f}s, "
            f"per-bridge {row['per_bridge_seconds'] * 1e6:.1f}us over {row['paths_timed']} paths"
        )


@main.command("table-a")
@common_options
@handles_errors
def table_a(config_path, **flags):
    """Dump the published index enumeration as CSV."""
    cfg = _build_config(config_path, **flags)
    result = run_table_a(cfg)
    if cfg.out:
        click.echo(f"wrote {cfg.out}/table_a.csv ({len(result['rows'])} indices)")
    else:
        click.echo(",".join(result["header"]))
        for row in result["rows"]:
            click.echo(",".join(str(c) for c in row))


@main.command("dump-propagator")
@common_options
@handles_errors
def dump_propagator(config_path, **flags):
    """Solve the coefficient system and dump it as CSV (t, one column per index)."""
    cfg = _build_config(config_path, **flags)
    sol = run_dump_propagator(cfg)
    click.echo(f"solved {len(sol.index_set)} coefficients on {sol.grid.N + 1} nodes")
    if cfg.out:
        click.echo(f"wrote {cfg.out}/propagator.csv")


if __name__ == "__main__":
    main()
