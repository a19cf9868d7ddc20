"""Command-line front end.

Every command accepts a configuration path or a bundled preset name
(``paper-reference`` or ``ideal``), writes plot-ready CSV or JSON, and is
fully deterministic: rerunning a command with the same configuration gives
byte-identical output regardless of the thread count.

Exit codes: 0 success, 2 configuration error, 3 resource-cap error.
"""
from __future__ import annotations

import functools
import os
import sys
from pathlib import Path

import click

from . import serialization as ser
from .config import load_config, load_experiment_file
from .errors import ConfigError, JxsimError, ResourceLimitError
from .interference import (
    collision_free_patterns,
    degree_of_violation,
    hom_scan,
    pattern_is_suppressed,
    simulate_experiment,
    twofold_distribution,
)
from .oracle import validate_fast_path
from .source import enumerate_input_states

DEFAULT_VALIDATION_SEED = 2024


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ResourceLimitError as exc:
            click.echo(f"resource limit: {exc}", err=True)
            sys.exit(3)
        except (ConfigError, JxsimError) as exc:
            click.echo(f"configuration error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _common_options(fn):
    fn = click.option(
        "--format", "fmt", type=click.Choice(["json", "csv"]), default="csv",
        show_default=True, help="Output format.",
    )(fn)
    fn = click.option(
        "--seedless", is_flag=True, default=False,
        help="Force the built-in deterministic seed (the simulation pipeline "
             "itself uses no randomness).",
    )(fn)
    fn = click.option(
        "--out", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
        help="Write to this file instead of stdout.",
    )(fn)
    return fn


def _emit(text: str, out: Path | None):
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)
        click.echo(f"wrote {out}", err=True)


def _threads_option(fn):
    return click.option(
        "--threads", type=int, default=lambda: int(os.environ.get("JXSIM_THREADS", "1")),
        help="Worker threads for the engine (default from JXSIM_THREADS).",
    )(fn)


@click.group()
def main():
    """Exact multiphoton interference statistics for Jx lattices."""


@main.command("suppression-table")
@click.argument("modes", type=int)
@click.argument("photons", type=int)
@_common_options
@_exit_codes
def cmd_suppression_table(modes, photons, fmt, seedless, out):
    """All collision-free detector patterns with their suppression flag."""
    if photons > modes:
        raise ConfigError("more photons than modes has no collision-free pattern")
    if modes % 2 == 0:
        raise ConfigError("the mirror suppression law needs an odd mode count")
    rows = [(p, pattern_is_suppressed(p)) for p in collision_free_patterns(modes, photons)]
    text = ser.suppression_table_json(rows) if fmt == "json" else ser.suppression_table_csv(rows)
    _emit(text, out)


@main.command("simulate")
@click.argument("config", type=str)
@click.option("--scenario", type=str, default=None, help="Override the configured scenario.")
@_threads_option
@_common_options
@_exit_codes
def cmd_simulate(config, scenario, threads, fmt, seedless, out):
    """Fourfold coincidence distribution with contribution breakdown."""
    cfg = load_config(config, scenario=scenario)
    dist = simulate_experiment(cfg, threads=threads)
    if fmt == "json":
        text = ser.distribution_to_json(dist, scenario=cfg.scenario)
    else:
        text = ser.distribution_to_csv(dist)
        text += f"# degree_of_violation,{degree_of_violation(dist)!r}\n"
    _emit(text, out)


@main.command("twofold")
@click.argument("config", type=str)
@click.option("--scenario", type=str, default=None, help="Override the configured scenario.")
@_threads_option
@_common_options
@_exit_codes
def cmd_twofold(config, scenario, threads, fmt, seedless, out):
    """Twofold coincidence distribution including the loss background."""
    cfg = load_config(config, scenario=scenario)
    dist = twofold_distribution(cfg, threads=threads)
    if fmt == "json":
        text = ser.distribution_to_json(dist, scenario=cfg.scenario)
    else:
        text = ser.distribution_to_csv(dist)
        text += f"# degree_of_violation,{degree_of_violation(dist)!r}\n"
    _emit(text, out)


@main.command("hom-scan")
@click.argument("config", type=str)
@click.option("--channel", type=click.Choice(["a", "b", "c", "d"]), default="d",
              show_default=True, help="Channel whose delay is scanned.")
@click.option("--pattern", default="1,4", show_default=True,
              help="Watched coincidence pattern, e.g. '1,4'.")
@click.option("--tau-max", type=float, default=1.0, show_default=True,
              help="Scan endpoint in ps (symmetric around zero).")
@click.option("--points", type=int, default=41, show_default=True)
@_common_options
@_exit_codes
def cmd_hom_scan(config, channel, pattern, tau_max, points, fmt, seedless, out):
    """Two-photon coincidence probability versus channel delay."""
    cfg = load_config(config)
    try:
        watch = tuple(sorted(int(x) for x in pattern.split(",")))
    except ValueError:
        raise ConfigError(f"malformed pattern {pattern!r}") from None
    if points < 2:
        raise ConfigError("a scan needs at least two points")
    taus = [-tau_max + 2.0 * tau_max * k / (points - 1) for k in range(points)]
    scan = hom_scan(cfg, channel, taus, watch)
    text = ser.scan_json(scan) if fmt == "json" else ser.scan_csv(scan)
    _emit(text, out)


@main.command("table2")
@click.argument("config", type=str)
@_common_options
@_exit_codes
def cmd_table2(config, fmt, seedless, out):
    """Generation probabilities of every contributing emission pattern."""
    cfg = load_config(config)
    photon_numbers = tuple(k for k in (4, 6) if k <= cfg.source.max_photons)
    records = enumerate_input_states(
        cfg.source, cfg.wiring, photon_numbers=photon_numbers, mode_count=cfg.mode_count
    )
    text = ser.table2_json(records) if fmt == "json" else ser.table2_csv(records)
    _emit(text, out)


@main.command("validate")
@click.argument("config", type=str, default="paper-reference")
@click.option("--cases", type=int, default=100, show_default=True,
              help="Randomized comparison cases.")
@click.option("--seed", type=int, default=DEFAULT_VALIDATION_SEED, show_default=True)
@_common_options
@_exit_codes
def cmd_validate(config, cases, seed, fmt, seedless, out):
    """Compare the fast engine against the brute-force oracles."""
    cfg = load_config(config)
    if seedless:
        seed = DEFAULT_VALIDATION_SEED
    report = validate_fast_path(
        cfg.source, cfg.wiring, cfg.distinguishing_delay, random_cases=cases, seed=seed
    )
    if fmt == "json":
        import json

        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        text = "max_abs_diff,worst_case,cases_checked\n" + (
            f"{report.max_abs_diff!r},\"{report.worst_case}\",{report.cases_checked}\n"
        )
    _emit(text, out)


@main.group("jsa")
def jsa_group():
    """Joint-spectral-amplitude utilities."""


@jsa_group.command("export")
@click.argument("config", type=str)
@click.option("--source", "which", type=click.Choice(["ab", "cd"]), default="ab",
              show_default=True, help="Which pair source to export.")
@_common_options
@_exit_codes
def cmd_jsa_export(config, which, fmt, seedless, out):
    """Write the calibrated pair amplitude to JSON or CSV planes."""
    cfg = load_config(config)
    jsa = cfg.source.jsa_ab if which == "ab" else cfg.source.jsa_cd
    if fmt == "json":
        _emit(ser.jsa_to_json(jsa), out)
        return
    if out is None:
        raise ConfigError("CSV export writes two planes; --out is required")
    real_text, imag_text = ser.jsa_planes_to_csv(jsa)
    real_path = out.with_suffix(".real.csv")
    imag_path = out.with_suffix(".imag.csv")
    real_path.write_text(real_text)
    imag_path.write_text(imag_text)
    click.echo(f"wrote {real_path} and {imag_path}", err=True)


if __name__ == "__main__":
    main()
