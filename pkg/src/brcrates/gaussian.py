"""Closed-form rates for the two-branch Gaussian broadcast relay channel.

Branch 1 has its relay near the source (DF), branch 2 near its destination
(CF). Every distance ``d`` enters as the power loss ``d**delta``::

    Y1 = X/sqrt(d_y1^δ) + X1/sqrt(d_z1y1^δ) + N1      Z1 = X/sqrt(d_z1^δ) + Ñ1
    Y2 = X/sqrt(d_y2^δ) + X2/sqrt(d_z2y2^δ) + N2      Z2 = X/sqrt(d_z2^δ) + Ñ2

Rate functions accept numpy arrays for the power-split/correlation
parameters so that optimiser grids can be evaluated in one call.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import NamedTuple

import numpy as np

from .info import Unit
from .optimize import maximize_1d, maximize_2d

LINKS = ("y1", "y2", "z1", "z2", "z1y1", "z2y2")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class GaussianBrcConfig:
    p: float
    p1: float
    p2: float
    n1: float
    n2: float
    nt1: float
    nt2: float
    d_y1: float
    d_y2: float
    d_z1: float
    d_z2: float
    d_z1y1: float
    d_z2y2: float
    delta: float = 2.0
    unit: Unit = Unit.BITS

    def __post_init__(self):
        object.__setattr__(self, "unit", Unit.parse(self.unit))
        for name in ("p", "p1", "p2", "n1", "n2", "nt1", "nt2"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(name, f"must be a positive finite number, got {v!r}")
        for link in LINKS:
            v = getattr(self, f"d_{link}")
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"d_{link}", f"distance must be positive, got {v!r}")
        if not (isinstance(self.delta, (int, float)) and math.isfinite(self.delta) and self.delta >= 0):
            raise ConfigError("delta", f"path-loss exponent must be non-negative, got {self.delta!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "GaussianBrcConfig":
        names = [f.name for f in fields(cls)]
        for key in doc:
            if key not in names:
                raise ConfigError(key, "unknown field")
        for name in names:
            if name not in doc and name not in ("delta", "unit"):
                raise ConfigError(name, "missing required field")
        kwargs = {}
        for key, value in doc.items():
            if key == "unit":
                try:
                    kwargs[key] = Unit.parse(value)
                except ValueError as exc:
                    raise ConfigError(key, str(exc)) from None
            elif isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(key, f"expected a number, got {value!r}")
            else:
                kwargs[key] = float(value)
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "GaussianBrcConfig":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<file>", f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("<file>", "top-level JSON value must be an object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["unit"] = self.unit.value
        return doc

    def with_(self, **changes) -> "GaussianBrcConfig":
        return replace(self, **changes)


class CompressionNoise(NamedTuple):
    n_hat2: float


class Case1Rates(NamedTuple):
    r1_relay: float
    r1_direct: float
    r2: float
    gamma_star: float


class Case2Rates(NamedTuple):
    r11: float
    r12: float
    r2: float
    clamped: bool


@dataclass(frozen=True)
class DpcParams:
    alpha: float
    beta: float
    lam: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "lam"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


class BestPrivate(NamedTuple):
    r1_star: float
    r2_star: float
    beta_star: float
    lambda_star: float | None


def _cap(snr, unit: Unit):
    return 0.5 * unit.log(1.0 + snr)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def attenuation(cfg: GaussianBrcConfig, link: str) -> float:
    """Power loss ``d_link ** delta`` of one link."""
    if link not in LINKS:
        raise KeyError(f"unknown link {link!r}; expected one of {LINKS}")
    return getattr(cfg, f"d_{link}") ** cfg.delta


def compression_noise(cfg: GaussianBrcConfig, branch: int = 2) -> CompressionNoise:
    """Quantisation-noise variance of the CF relay's description on ``branch``.

    Branch 2 is the CF branch of the scheme; branch 1 gives the same choice for
    a CF relay on the first branch (used by the CF-only baseline).
    """
    if branch == 2:
        dy, dz, dzy, n, nt, pr = (attenuation(cfg, "y2"), attenuation(cfg, "z2"),
                                  attenuation(cfg, "z2y2"), cfg.n2, cfg.nt2, cfg.p2)
    elif branch == 1:
        dy, dz, dzy, n, nt, pr = (attenuation(cfg, "y1"), attenuation(cfg, "z1"),
                                  attenuation(cfg, "z1y1"), cfg.n1, cfg.nt1, cfg.p1)
    else:
        raise ValueError(f"branch must be 1 or 2, got {branch}")
    return CompressionNoise(nt * (cfg.p * (1.0 / (dy * n) + 1.0 / (dz * nt)) + 1.0) / (pr / (dzy * n)))


def _coherent_snr(cfg, p_src, rho_bar, branch):
    """SNR of source + relay combining coherently at a destination, before dividing by noise."""
    if branch == 1:
        dy, dzy, pr = attenuation(cfg, "y1"), attenuation(cfg, "z1y1"), cfg.p1
    else:
        dy, dzy, pr = attenuation(cfg, "y2"), attenuation(cfg, "z2y2"), cfg.p2
    return p_src / dy + pr / dzy + 2.0 * np.sqrt(np.maximum(rho_bar, 0.0) * p_src * pr / (dy * dzy))


def _cf_noises(cfg):
    nh = compression_noise(cfg).n_hat2
    return attenuation(cfg, "y2") * cfg.n2, attenuation(cfg, "z2") * (nh + cfg.nt2)


def case1_gamma_star(cfg: GaussianBrcConfig, alpha: float) -> float:
    """DPC coefficient for Case 1; the effective noise is the parallel combination of Y2's and Zhat2's."""
    ny, nz = _cf_noises(cfg)
    n_t1 = 1.0 / (1.0 / nz + 1.0 / ny)
    ap = (1.0 - alpha) * cfg.p
    return ap / (ap + n_t1)


def case1_rates(cfg: GaussianBrcConfig, params: DpcParams | None = None, *, alpha=None, beta=None) -> Case1Rates:
    """Case 1 (DPC on the CF user's codeword against the DF user's): rates at the optimal γ."""
    if params is not None:
        alpha, beta = params.alpha, params.beta
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    abar = 1.0 - a
    p, u = cfg.p, cfg.unit
    dz1, dy1 = attenuation(cfg, "z1"), attenuation(cfg, "y1")
    r1_relay = _cap(a * b * p / (abar * p + dz1 * cfg.nt1), u)
    r1_direct = _cap(_coherent_snr(cfg, a * p, 1.0 - b, 1) / (abar * p / dy1 + cfg.n1), u)
    ny, nz = _cf_noises(cfg)
    r2 = _cap(abar * p / ny + abar * p / nz, u)
    r2 = np.broadcast_to(r2, np.broadcast(a, b).shape)
    gamma = case1_gamma_star(cfg, a)
    return Case1Rates(_scalar(r1_relay), _scalar(r1_direct), _scalar(r2), _scalar(gamma))


def case1_best(cfg: GaussianBrcConfig, alpha: float, coarse_step=1e-2, refine_tol=1e-5) -> BestPrivate:
    """Best DF-user rate over the source-relay correlation for a fixed power split."""

    def objective(beta):
        r = case1_rates(cfg, alpha=alpha, beta=beta)
        return min(r.r1_relay, r.r1_direct)

    beta_star, r1 = maximize_1d(objective, coarse_step, refine_tol)
    r2 = case1_rates(cfg, alpha=alpha, beta=beta_star).r2
    return BestPrivate(max(r1, 0.0), max(r2, 0.0), beta_star, None)


def case2_gamma_star(cfg: GaussianBrcConfig, params: DpcParams) -> float:
    """Case-2 DPC coefficient for U2 = X_B + γ X1 (X_A acts as extra noise on both observations)."""
    a, b = params.alpha, params.beta
    ny, nz = _cf_noises(cfg)
    interf = b * a * cfg.p
    n_t2 = 1.0 / (1.0 / (nz + interf) + 1.0 / (ny + interf))
    ap = (1.0 - a) * cfg.p
    return math.sqrt((1.0 - b) * a * cfg.p / cfg.p1) * ap / (ap + n_t2)


def _half_log_ratio(num, den, unit: Unit):
    """1/2 log(num/den), clamped at 0; also reports where clamping happened."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    ok = (num > 0) & (den > 0)
    ratio = np.where(ok, num / np.where(den > 0, den, 1.0), 1.0)
    clamped = ratio < 1.0
    rate = 0.5 * unit.log(np.maximum(ratio, 1.0))
    return rate, clamped


def case2_rates(cfg: GaussianBrcConfig, params: DpcParams | None = None, *, alpha=None, beta=None, lam=None) -> Case2Rates:
    """Case 2 (DPC against X1 for the CF user, then against X_B for the DF user)."""
    if params is not None:
        alpha, beta, lam = params.alpha, params.beta, params.lam
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    p, u = cfg.p, cfg.unit
    abp = a * b * p
    abar_p = (1.0 - a) * p
    dz1n = attenuation(cfg, "z1") * cfg.nt1
    dy1 = attenuation(cfg, "y1")

    r11, c11 = _half_log_ratio(
        abp * (abp + abar_p + dz1n),
        dz1n * (abp + lam**2 * abar_p) + (1.0 - lam) ** 2 * abar_p * abp,
        u,
    )
    r12, c12 = _half_log_ratio(
        abp * (_coherent_snr(cfg, p, (1.0 - b) * a, 1) + cfg.n1),
        cfg.n1 * (abp + lam**2 * abar_p) + (1.0 - lam) ** 2 * abar_p * abp / dy1,
        u,
    )
    ny, nz = _cf_noises(cfg)
    r2 = _cap(abar_p / (ny + abp) + abar_p / (nz + abp), u)
    clamped = np.logical_or(c11, c12) & (abp > 0)
    shape = np.broadcast(a, b, lam).shape
    return Case2Rates(
        _scalar(np.broadcast_to(r11, shape)),
        _scalar(np.broadcast_to(r12, shape)),
        _scalar(np.broadcast_to(r2, shape)),
        bool(np.any(clamped)) if shape == () else np.broadcast_to(clamped, shape),
    )


def case2_best(cfg: GaussianBrcConfig, alpha: float, coarse_step=1e-2, refine_tol=1e-5) -> BestPrivate:
    """Best DF-user rate over (β, λ) for a fixed power split; R2 is taken at the maximising β."""

    def objective(beta, lam):
        r = case2_rates(cfg, alpha=alpha, beta=beta, lam=lam)
        return np.minimum(r.r11, r.r12)

    beta_star, lam_star, r1 = maximize_2d(objective, coarse_step, refine_tol, vectorized=True)
    r2 = case2_rates(cfg, alpha=alpha, beta=beta_star, lam=lam_star).r2
    return BestPrivate(max(r1, 0.0), max(r2, 0.0), beta_star, lam_star)


class CommonBounds(NamedTuple):
    r_df_relay: float
    r_df_direct: float
    r_cf: float


def common_rate_bounds(cfg: GaussianBrcConfig, beta) -> CommonBounds:
    """The two DF terms (relay decoding, destination 1) and the CF term for the common message."""
    b = np.asarray(beta, dtype=float)
    u = cfg.unit
    r_relay = _cap(b * cfg.p / (attenuation(cfg, "z1") * cfg.nt1), u)
    r_direct = _cap(_coherent_snr(cfg, cfg.p, 1.0 - b, 1) / cfg.n1, u)
    return CommonBounds(_scalar(r_relay), _scalar(r_direct), cf_rate(cfg, 2))


def df_rate(cfg: GaussianBrcConfig, branch: int = 1, coarse_step=1e-2, refine_tol=1e-5) -> tuple[float, float]:
    """Classical DF rate on one branch, maximised over β; returns ``(rate, beta_star)``."""
    if branch == 1:
        dz, nt, n = attenuation(cfg, "z1"), cfg.nt1, cfg.n1
    elif branch == 2:
        dz, nt, n = attenuation(cfg, "z2"), cfg.nt2, cfg.n2
    else:
        raise ValueError(f"branch must be 1 or 2, got {branch}")

    def objective(beta):
        relay = _cap(beta * cfg.p / (dz * nt), cfg.unit)
        direct = _cap(_coherent_snr(cfg, cfg.p, 1.0 - beta, branch) / n, cfg.unit)
        return float(min(relay, direct))

    beta_star, rate = maximize_1d(objective, coarse_step, refine_tol)
    return rate, beta_star


def cf_rate(cfg: GaussianBrcConfig, branch: int = 2) -> float:
    """Classical CF rate on one branch with the compression noise of :func:`compression_noise`."""
    nh = compression_noise(cfg, branch).n_hat2
    if branch == 2:
        snr = cfg.p / (attenuation(cfg, "y2") * cfg.n2) + cfg.p / (attenuation(cfg, "z2") * (nh + cfg.nt2))
    else:
        snr = cfg.p / (attenuation(cfg, "y1") * cfg.n1) + cfg.p / (attenuation(cfg, "z1") * (nh + cfg.nt1))
    return float(_cap(snr, cfg.unit))


def common_rate_lower(cfg: GaussianBrcConfig, coarse_step=1e-2, refine_tol=1e-5) -> tuple[float, float]:
    """Achievable common rate ``min(max_β DF, CF)``; returns ``(r0, beta_star)``."""
    r_df, beta_star = df_rate(cfg, 1, coarse_step, refine_tol)
    return min(r_df, cf_rate(cfg, 2)), beta_star


def _cutset_branch(cfg: GaussianBrcConfig, branch: int, beta):
    if branch == 1:
        dz, dy, nt, n = attenuation(cfg, "z1"), attenuation(cfg, "y1"), cfg.nt1, cfg.n1
    else:
        dz, dy, nt, n = attenuation(cfg, "z2"), attenuation(cfg, "y2"), cfg.nt2, cfg.n2
    bc = _cap(beta * cfg.p * (1.0 / (dz * nt) + 1.0 / (dy * n)), cfg.unit)
    mac = _cap(_coherent_snr(cfg, cfg.p, 1.0 - beta, branch) / n, cfg.unit)
    return np.minimum(bc, mac)


def cutset_terms(cfg: GaussianBrcConfig, beta1, beta2) -> float:
    """Minimum of the four cut-set terms at fixed correlations."""
    return _scalar(np.minimum(_cutset_branch(cfg, 1, beta1), _cutset_branch(cfg, 2, beta2)))


def cutset_upper(cfg: GaussianBrcConfig, coarse_step=1e-2, refine_tol=1e-5) -> tuple[float, float, float]:
    """Upper bound on the common rate; returns ``(r0_upper, beta1_star, beta2_star)``.

    The two branches share no parameter, so the joint max-min splits into two
    one-dimensional searches.
    """
    b1, v1 = maximize_1d(lambda b: float(_cutset_branch(cfg, 1, b)), coarse_step, refine_tol)
    b2, v2 = maximize_1d(lambda b: float(_cutset_branch(cfg, 2, b)), coarse_step, refine_tol)
    return min(v1, v2), b1, b2
