"""Command-line front end.

Usage:
    brcrates common-rate --config cfg.json [--sweep d1=0.05:0.95:0.05]
    brcrates private-frontier --config cfg.json --alpha-steps 21
    brcrates expected-rate --config cfg.json --p-steps 101
    brcrates region --config quantities.json --point 0.5,0.5,0.5
    brcrates fm-verify --samples 100 --seed 7

Tables are CSV preceded by ``#`` manifest lines. Exit codes: 0 success,
1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import contextlib
import csv
import json
import math
import os
import sys
from typing import Iterable, Sequence

import click
import numpy as np

from . import __version__
from . import gaussian as g
from .fourier_motzkin import compare_with_theorem, sample_brc_terms
from .gaussian import ConfigError, GaussianBrcConfig
from .info import Unit
from .region import InfoQuantities, theorem1_region
from .strategy import fig3_sweep, fig4_sweep, private_frontier

SWEEP_TOL = 1e-12


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(x)
    return f"{float(x):.9g}"


def parse_sweep(spec: str) -> tuple[str, list[float]]:
    """Parse ``name=start:stop:step`` (name optional) into an inclusive grid."""
    name, _, rng = spec.rpartition("=")
    try:
        start, stop, step = (float(x) for x in rng.split(":"))
    except ValueError:
        raise click.BadParameter(f"expected [name=]start:stop:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise click.BadParameter(f"empty sweep {spec!r}")
    n = int(math.floor((stop - start) / step + SWEEP_TOL))
    return name.strip(), [round(start + k * step, 12) for k in range(n + 1)]


def manifest(subcommand: str, config: str | None, out: str | None, **grid) -> list[str]:
    # SOURCE_DATE_EPOCH keeps repeated runs byte-identical
    lines = [
        f"tool: brcrates {__version__}",
        f"subcommand: {subcommand}",
        f"config: {config or '-'}",
        f"output: {out or '-'}",
    ]
    lines += [f"{k}: {v}" for k, v in grid.items()]
    lines.append(f"timestamp: {os.environ.get('SOURCE_DATE_EPOCH', 'unset')}")
    return lines


@contextlib.contextmanager
def _open_out(out: str | None):
    if out in (None, "-"):
        yield sys.stdout
    else:
        with open(out, "w", newline="") as fh:
            yield fh


def write_table(out: str | None, header_lines: Sequence[str], columns: Sequence[str], rows: Iterable[Sequence]):
    with _open_out(out) as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def load_config(path: str, log_base: str | None) -> GaussianBrcConfig:
    try:
        cfg = GaussianBrcConfig.load(path)
    except OSError as exc:
        _fail(f"cannot read config {path}: {exc.strerror}")
    except ConfigError as exc:
        _fail(f"invalid config {path}: field {exc}")
    if log_base is not None:
        cfg = cfg.with_(unit=Unit.parse(log_base))
    return cfg


out_option = click.option("--out", "out", type=str, default=None, help="Output path (default stdout).")
base_option = click.option("--log-base", type=click.Choice(["2", "e"]), default=None,
                           help="Override the config's rate unit (2 = bits, e = nats).")
config_option = click.option("--config", "config", type=str, required=True, help="JSON config path.")


@click.group()
@click.version_option(__version__, prog_name="brcrates")
def main():
    """Rate bounds for the broadcast relay channel with DF and CF relays."""


@main.command("common-rate")
@config_option
@out_option
@base_option
@click.option("--sweep", type=str, default=None, help="Relay-1 position sweep, e.g. d1=0.05:0.95:0.05.")
def common_rate(config, out, log_base, sweep):
    """Common-message lower and cut-set upper bounds, optionally swept over relay-1 position."""
    cfg = load_config(config, log_base)
    if sweep is None:
        r0, beta = g.common_rate_lower(cfg)
        upper, b1, b2 = g.cutset_upper(cfg)
        write_table(out, manifest("common-rate", config, out),
                    ("r0_lower", "beta_star", "r0_upper", "beta1_star", "beta2_star"),
                    [(r0, beta, upper, b1, b2)])
        return
    name, grid = parse_sweep(sweep)
    if name not in ("d1", ""):
        _fail(f"common-rate can only sweep d1, got {name!r}")
    result = fig4_sweep(cfg, grid)
    header = manifest("common-rate", config, out, sweep=sweep)
    header += [f"skipped d1={fmt(d)}: non-positive relay distance" for d in result.skipped]
    write_table(out, header, ("d1", "r_df", "r_cf", "r0_proposed", "r_ts", "r0_upper"), result.rows)


@main.command("private-frontier")
@config_option
@out_option
@base_option
@click.option("--alpha-steps", type=int, default=21, show_default=True)
def private_frontier_cmd(config, out, log_base, alpha_steps):
    """Best private-rate pairs for both DPC cases across the power split."""
    if alpha_steps < 2:
        _fail("--alpha-steps must be at least 2")
    cfg = load_config(config, log_base)
    rows = private_frontier(cfg, alpha_steps)
    write_table(out, manifest("private-frontier", config, out, alpha_steps=alpha_steps),
                ("alpha", "case", "r1_star", "r2_star", "beta_star", "lambda_star", "envelope"), rows)


@main.command("expected-rate")
@config_option
@out_option
@base_option
@click.option("--p-steps", type=int, default=101, show_default=True)
@click.option("--alpha-steps", type=int, default=51, show_default=True)
@click.option("--sweep", type=str, default=None, help="Explicit prior grid, e.g. p=0:1:0.05 (overrides --p-steps).")
def expected_rate_cmd(config, out, log_base, p_steps, alpha_steps, sweep):
    """Expected rate of the proposed scheme and the single-strategy baselines."""
    if p_steps < 2 and sweep is None:
        _fail("--p-steps must be at least 2")
    if alpha_steps < 2:
        _fail("--alpha-steps must be at least 2")
    cfg = load_config(config, log_base)
    if sweep is not None:
        name, grid = parse_sweep(sweep)
        if name not in ("p", ""):
            _fail(f"expected-rate can only sweep p, got {name!r}")
        if grid[0] < 0 or grid[-1] > 1:
            _fail("p sweep must stay within [0, 1]")
        grid_info = {"sweep": sweep}
    else:
        grid = [float(x) for x in np.linspace(0.0, 1.0, p_steps)]
        grid_info = {"p_steps": p_steps}
    rows = fig3_sweep(cfg, grid, alpha_steps)
    write_table(out, manifest("expected-rate", config, out, alpha_steps=alpha_steps, **grid_info),
                ("p", "proposed", "df_only", "cf_only", "common_only"), rows)


def _parse_point(text: str) -> tuple[float, float, float]:
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        values = ()
    if len(values) != 3 or not all(math.isfinite(v) for v in values):
        _fail(f"--point must be three comma-separated numbers r0,r1,r2, got {text!r}")
    return values


@main.command("region")
@config_option
@click.option("--point", required=True, type=str, help="Rate triple r0,r1,r2.")
@click.option("--tol", type=float, default=1e-9, show_default=True)
@out_option
def region_cmd(config, point, tol, out):
    """Test a rate triple against the DF-CF inner bound for given information quantities."""
    pt = _parse_point(point)
    try:
        with open(config) as fh:
            q = InfoQuantities.from_dict(json.load(fh))
    except OSError as exc:
        _fail(f"cannot read {config}: {exc.strerror}")
    except (ValueError, TypeError) as exc:
        _fail(f"invalid quantities {config}: {exc}")
    region = theorem1_region(q)
    member = region.contains(pt, tol)
    with _open_out(out) as fh:
        fh.write("member\n" if member else "non-member\n")
        for ineq, s in zip(region.inequalities, region.slacks(pt)):
            fh.write(f"{ineq.label}\tslack={fmt(s)}\n")
        for name, v in zip(region.coords, pt):
            fh.write(f"{name}>=0\tslack={fmt(v)}\n")


@main.command("fm-verify")
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--step", type=float, default=0.05, show_default=True)
@out_option
def fm_verify(samples, seed, step, out):
    """Compare the eliminated coding constraints with the five-inequality region on random instances."""
    if samples < 1:
        _fail("--samples must be at least 1")
    if step <= 0:
        _fail("--step must be positive")
    rng = np.random.default_rng(seed)
    passes = 0
    lines = [f"# {line}" for line in manifest("fm-verify", None, out, samples=samples, seed=seed, step=step)]
    for k in range(samples):
        res = compare_with_theorem(sample_brc_terms(rng), step)
        passes += res.agree
        lines.append(
            f"sample {k}: {'pass' if res.agree else 'FAIL'} points={res.points} "
            f"derived_only={res.derived_only} theorem_only={res.theorem_only}"
        )
    lines.append(f"passes: {passes}/{samples}")
    with _open_out(out) as fh:
        fh.write("\n".join(lines) + "\n")
    if passes != samples:
        sys.exit(1)


if __name__ == "__main__":
    main()
