"""Composite-channel comparison of the DF-CF broadcast scheme against single-strategy baselines.

The relay sits next to the source with probability ``p`` (branch 1, DF is
natural) and next to the destination otherwise (branch 2, CF is natural).
A triple (R0, R1, R2) earns the expected rate R0 + p R1 + (1 - p) R2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import gaussian as g
from .gaussian import GaussianBrcConfig
from .optimize import maximize_1d

log = logging.getLogger(__name__)

STRATEGIES = ("proposed", "df_only", "cf_only", "time_sharing", "common_only")


@dataclass(frozen=True)
class CompositeModel:
    p: float
    cfg: GaussianBrcConfig

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class StrategyResult:
    name: str
    expected_rate: float
    operating_point: tuple[float, float, float] | None = None
    tau: float | None = None


def expected_rate(model: CompositeModel, r0: float, r1: float, r2: float) -> float:
    return r0 + model.p * r1 + (1.0 - model.p) * r2


def _single_scheme(model: CompositeModel, name: str, rate1: float, rate2: float) -> StrategyResult:
    # ties go to branch 1
    if rate1 >= rate2:
        r_max, p_max, r_min = rate1, model.p, rate2
        best_point = (0.0, rate1, 0.0)
    else:
        r_max, p_max, r_min = rate2, 1.0 - model.p, rate1
        best_point = (0.0, 0.0, rate2)
    if p_max * r_max > r_min:
        return StrategyResult(name, p_max * r_max, best_point)
    return StrategyResult(name, r_min, (r_min, 0.0, 0.0))


def baseline_df(model: CompositeModel) -> StrategyResult:
    """Invest only in DF: either the best branch's DF rate or the rate both branches decode."""
    return _single_scheme(model, "df_only", g.df_rate(model.cfg, 1)[0], g.df_rate(model.cfg, 2)[0])


def baseline_cf(model: CompositeModel) -> StrategyResult:
    return _single_scheme(model, "cf_only", g.cf_rate(model.cfg, 1), g.cf_rate(model.cfg, 2))


def time_sharing(r_df: float, r_cf: float, refine_tol: float = 1e-10) -> tuple[float, float]:
    """Compound-setting time sharing: max over τ of min(τ R_DF, (1 - τ) R_CF)."""
    if r_df < 0 or r_cf < 0:
        raise ValueError("rates must be non-negative")
    return maximize_1d(lambda t: min(t * r_df, (1.0 - t) * r_cf), refine_tol=refine_tol)


def time_sharing_closed_form(r_df: float, r_cf: float) -> tuple[float, float]:
    if r_df <= 0 or r_cf <= 0:
        return 0.0, 0.0
    return r_cf / (r_df + r_cf), r_df * r_cf / (r_df + r_cf)


class FrontierRow(NamedTuple):
    alpha: float
    case: int
    r1_star: float
    r2_star: float
    beta_star: float
    lambda_star: float | None
    envelope: bool


def _pareto_flags(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    flags = np.ones(len(points), dtype=bool)
    for i, pt in enumerate(points):
        dominated = np.all(points >= pt - tol, axis=1) & np.any(points > pt + tol, axis=1)
        flags[i] = not dominated.any()
    return flags


def private_frontier(cfg: GaussianBrcConfig, alpha_steps: int = 51) -> list[FrontierRow]:
    """(R1*, R2*) for both DPC cases across a power-split grid, with Pareto-envelope flags."""
    if alpha_steps < 2:
        raise ValueError("alpha_steps must be at least 2")
    raw = []
    for alpha in np.linspace(0.0, 1.0, alpha_steps):
        alpha = float(alpha)
        b1 = g.case1_best(cfg, alpha)
        raw.append((alpha, 1, b1.r1_star, b1.r2_star, b1.beta_star, None))
        b2 = g.case2_best(cfg, alpha)
        raw.append((alpha, 2, b2.r1_star, b2.r2_star, b2.beta_star, b2.lambda_star))
    flags = _pareto_flags(np.array([[r[2], r[3]] for r in raw]))
    return [FrontierRow(*r, bool(f)) for r, f in zip(raw, flags)]


def _candidate_points(cfg: GaussianBrcConfig, frontier: Sequence[FrontierRow], mix_steps: int) -> np.ndarray:
    r0, _ = g.common_rate_lower(cfg)
    common = np.array([r0, 0.0, 0.0])
    private = np.array([[0.0, row.r1_star, row.r2_star] for row in frontier])
    theta = np.linspace(0.0, 1.0, mix_steps)[:, None, None]
    mixed = theta * common + (1.0 - theta) * private[None, :, :]
    return np.vstack([common[None, :], private, mixed.reshape(-1, 3)])


def proposed_expected(
    model: CompositeModel,
    frontier: Sequence[FrontierRow] | None = None,
    alpha_steps: int = 51,
    mix_steps: int = 101,
) -> StrategyResult:
    """Best expected rate over common-only, private-only and time-shared common/private points."""
    if frontier is None:
        frontier = private_frontier(model.cfg, alpha_steps)
    points = _candidate_points(model.cfg, frontier, mix_steps)
    return _best_point(points, model.p)


def _best_point(points: np.ndarray, p: float) -> StrategyResult:
    values = points @ np.array([1.0, p, 1.0 - p])
    i = int(np.argmax(values))
    return StrategyResult("proposed", float(values[i]), tuple(float(x) for x in points[i]))


# --- figure data -------------------------------------------------------------

def fig3_config(delta: float = 2.0, **overrides) -> GaussianBrcConfig:
    """Unit noises, P = P1 = P2 = 10, source-destination distances (3, 1), relays at (1, 2) and (0.9, 0.1)."""
    base = dict(p=10.0, p1=10.0, p2=10.0, n1=1.0, n2=1.0, nt1=1.0, nt2=1.0,
                d_y1=3.0, d_y2=1.0, d_z1=1.0, d_z1y1=2.0, d_z2=0.9, d_z2y2=0.1, delta=delta)
    base.update(overrides)
    return GaussianBrcConfig(**base)


def fig4_config(d1: float = 0.5, delta: float = 1.0, **overrides) -> GaussianBrcConfig:
    """Unit noises, P = P1 = P2 = 10, unit source-destination distances, relay 2 at (0.7, 0.3), relay 1 at d1."""
    base = dict(p=10.0, p1=10.0, p2=10.0, n1=1.0, n2=1.0, nt1=1.0, nt2=1.0,
                d_y1=1.0, d_y2=1.0, d_z1=d1, d_z1y1=1.0 - d1, d_z2=0.7, d_z2y2=0.3, delta=delta)
    base.update(overrides)
    return GaussianBrcConfig(**base)


class Fig3Row(NamedTuple):
    p: float
    proposed: float
    df_only: float
    cf_only: float
    common_only: float


class Fig4Row(NamedTuple):
    d1: float
    r_df: float
    r_cf: float
    r0_proposed: float
    r_ts: float
    r0_upper: float


def fig3_sweep(cfg: GaussianBrcConfig, p_grid: Sequence[float], alpha_steps: int = 51) -> list[Fig3Row]:
    """Expected rate of every strategy across the composite prior ``p``."""
    frontier = private_frontier(cfg, alpha_steps)
    points = _candidate_points(cfg, frontier, mix_steps=101)
    df1, df2 = g.df_rate(cfg, 1)[0], g.df_rate(cfg, 2)[0]
    cf1, cf2 = g.cf_rate(cfg, 1), g.cf_rate(cfg, 2)
    common, _ = g.common_rate_lower(cfg)
    rows = []
    for p in p_grid:
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        model = CompositeModel(p, cfg)
        rows.append(Fig3Row(
            p,
            _best_point(points, p).expected_rate,
            _single_scheme(model, "df_only", df1, df2).expected_rate,
            _single_scheme(model, "cf_only", cf1, cf2).expected_rate,
            common,
        ))
    return rows


class Fig4Sweep(NamedTuple):
    rows: list[Fig4Row]
    skipped: list[float]


def fig4_sweep(cfg: GaussianBrcConfig, d1_grid: Sequence[float]) -> Fig4Sweep:
    """Common rate versus relay-1 position ``d1`` (d_z1 = d1, d_z1y1 = 1 - d1).

    Positions that make either relay-1 distance non-positive are skipped and
    reported in ``skipped``.
    """
    rows, skipped = [], []
    for d1 in d1_grid:
        d1 = float(d1)
        if d1 <= 0.0 or 1.0 - d1 <= 0.0:
            log.warning("skipping d1=%g: relay-1 distances must be positive", d1)
            skipped.append(d1)
            continue
        c = cfg.with_(d_z1=d1, d_z1y1=1.0 - d1)
        r_df, _ = g.df_rate(c, 1)
        r_cf = g.cf_rate(c, 2)
        _, r_ts = time_sharing(r_df, r_cf)
        upper, _, _ = g.cutset_upper(c)
        rows.append(Fig4Row(d1, r_df, r_cf, min(r_df, r_cf), r_ts, upper))
    return Fig4Sweep(rows, skipped)
