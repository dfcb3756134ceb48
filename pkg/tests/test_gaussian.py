import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brcrates import gaussian as g
from brcrates.gaussian import ConfigError, DpcParams, GaussianBrcConfig
from brcrates.region import corollary2_common_rate
from brcrates.strategy import fig4_config

LOG2 = math.log2


def C(x):
    return 0.5 * LOG2(1 + x)


def cfg_with(base, **kw):
    return base.with_(**kw)


def test_attenuation(unit_cfg):
    assert g.attenuation(unit_cfg, "y1") == 1.0
    c = unit_cfg.with_(d_z1=2.0, delta=1.0)
    assert g.attenuation(c, "z1") == 2.0
    c = unit_cfg.with_(d_z1=0.9, delta=2.0)
    assert g.attenuation(c, "z1") == pytest.approx(0.81, abs=1e-15)
    with pytest.raises(KeyError):
        g.attenuation(unit_cfg, "x")


def test_compression_noise(unit_cfg):
    assert g.compression_noise(unit_cfg).n_hat2 == pytest.approx((10 * 2 + 1) / 10, abs=1e-12)
    assert g.compression_noise(unit_cfg.with_(p2=1e9)).n_hat2 < 1e-7
    c = fig4_config(0.5, delta=1.0)
    assert g.compression_noise(c).n_hat2 == pytest.approx((10 * (1 + 1 / 0.7) + 1) * 0.3 / 10, abs=1e-12)
    assert g.compression_noise(c).n_hat2 == pytest.approx(0.75857, abs=1e-5)


def test_case1_examples(unit_cfg):
    r = g.case1_rates(unit_cfg, DpcParams(0.0, 0.5))
    assert r.r1_relay == 0.0
    assert r.r2 == pytest.approx(g.cf_rate(unit_cfg), abs=1e-12)
    r = g.case1_rates(unit_cfg, DpcParams(1.0, 1.0))
    assert r.r1_relay == pytest.approx(0.5 * LOG2(11), abs=1e-12)
    assert r.r2 == 0.0


def test_case1_gamma_star(unit_cfg):
    c = unit_cfg.with_(p=20.0, delta=1.0, d_y2=2.0, d_z2=0.5)
    nh = (c.nt2 * (c.p * (1 / (2.0 * c.n2) + 1 / (0.5 * c.nt2)) + 1)) / (c.p2 / (1.0 * c.n2))
    n_t1 = 1 / (1 / (0.5 * (c.nt2 + nh)) + 1 / (2.0 * c.n2))
    alpha = 1 - n_t1 / c.p
    assert g.case1_rates(c, DpcParams(alpha, 0.3)).gamma_star == pytest.approx(0.5, abs=1e-12)


def test_case1_formula_longhand():
    c = GaussianBrcConfig(p=7, p1=3, p2=5, n1=1.5, n2=0.5, nt1=2, nt2=0.7, d_y1=1.3, d_y2=0.8,
                          d_z1=0.6, d_z2=0.9, d_z1y1=0.5, d_z2y2=0.4, delta=1.7)
    a, b = 0.35, 0.6
    d = {k: getattr(c, f"d_{k}") ** c.delta for k in ("y1", "y2", "z1", "z2", "z1y1", "z2y2")}
    nh = c.nt2 * (c.p * (1 / (d["y2"] * c.n2) + 1 / (d["z2"] * c.nt2)) + 1) / (c.p2 / (d["z2y2"] * c.n2))
    relay = C(a * b * c.p / ((1 - a) * c.p + d["z1"] * c.nt1))
    direct = C((a * c.p / d["y1"] + c.p1 / d["z1y1"] + 2 * math.sqrt((1 - b) * a * c.p * c.p1 / (d["y1"] * d["z1y1"])))
               / ((1 - a) * c.p / d["y1"] + c.n1))
    r2 = C((1 - a) * c.p / (d["y2"] * c.n2) + (1 - a) * c.p / (d["z2"] * (nh + c.nt2)))
    r = g.case1_rates(c, DpcParams(a, b))
    assert (r.r1_relay, r.r1_direct, r.r2) == pytest.approx((relay, direct, r2), abs=1e-12)


def _grid_best_beta(fn, step=1e-4):
    betas = np.linspace(0, 1, int(round(1 / step)) + 1)
    vals = np.array([fn(b) for b in betas])
    return float(vals.max())


@pytest.mark.parametrize("d_z1", [5.0, 0.01])
def test_case1_best_vs_grid(unit_cfg, d_z1):
    c = unit_cfg.with_(d_z1=d_z1, d_y1=2.0, delta=2.0)
    alpha = 0.6

    def objective(beta):
        r = g.case1_rates(c, alpha=alpha, beta=beta)
        return min(r.r1_relay, r.r1_direct)

    best = g.case1_best(c, alpha)
    oracle = _grid_best_beta(objective)
    assert best.r1_star >= oracle - 1e-8
    assert best.r1_star == pytest.approx(oracle, abs=1e-4)
    assert best.r2_star == pytest.approx(g.case1_rates(c, alpha=alpha, beta=0.0).r2, abs=1e-12)


def test_case1_best_interference_limited_relay(unit_cfg):
    # the residual (1 - alpha) P caps the relay term below the direct term, so all power goes to U1
    c = unit_cfg.with_(d_z1=1e-4, d_y1=2.0)
    best = g.case1_best(c, 0.5)
    assert best.beta_star == pytest.approx(1.0, abs=1e-5)
    assert best.r1_star == pytest.approx(C(5.0 / (5.0 + 1e-8)), abs=1e-9)


def test_case1_best_zero_alpha(unit_cfg):
    assert g.case1_best(unit_cfg, 0.0).r1_star == 0.0


def test_case2_examples(unit_cfg):
    for a in (0.2, 0.7):
        c2 = g.case2_rates(unit_cfg, DpcParams(a, 0.0, 0.4))
        c1 = g.case1_rates(unit_cfg, DpcParams(a, 0.0))
        assert c2.r2 == pytest.approx(c1.r2, abs=1e-12)
    r = g.case2_rates(unit_cfg, DpcParams(0.5, 1.0, 1.0))
    assert r.r11 == pytest.approx(0.5 * LOG2(55 / 10), abs=1e-12)
    assert r.r11 == pytest.approx(1.22971, abs=1e-5)


def _r11_longhand(c, a, b, lam):
    abp = a * b * c.p
    ab_ = (1 - a) * c.p
    dn = c.d_z1 ** c.delta * c.nt1
    num = abp * (abp + ab_ + dn)
    den = dn * (abp + lam * lam * ab_) + (1 - lam) ** 2 * ab_ * abp
    return max(0.5 * LOG2(num / den), 0.0)


def _r12_longhand(c, a, b, lam):
    abp = a * b * c.p
    ab_ = (1 - a) * c.p
    dy, dzy = c.d_y1 ** c.delta, c.d_z1y1 ** c.delta
    s = c.p / dy + c.p1 / dzy + 2 * math.sqrt((1 - b) * a * c.p * c.p1 / (dy * dzy)) + c.n1
    den = c.n1 * (abp + lam * lam * ab_) + (1 - lam) ** 2 * ab_ * abp / dy
    return max(0.5 * LOG2(abp * s / den), 0.0)


def test_case2_relay_noise_dominant(unit_cfg):
    c = unit_cfg.with_(nt1=50.0, d_z1=3.0)
    for a, b, lam in [(0.4, 0.9, 1.0), (0.8, 0.3, 0.6), (0.5, 0.5, 0.0)]:
        r = g.case2_rates(c, DpcParams(a, b, lam))
        assert r.r11 == pytest.approx(_r11_longhand(c, a, b, lam), abs=1e-12)
        assert r.r12 == pytest.approx(_r12_longhand(c, a, b, lam), abs=1e-12)


def test_case2_zero_power_guard(unit_cfg):
    r = g.case2_rates(unit_cfg, DpcParams(0.0, 0.0, 0.0))
    assert r.r11 == 0.0 and r.r12 == 0.0 and not r.clamped


def test_case2_clamps_negative_rates(unit_cfg):
    # tiny alpha*beta against full interference pushes the log argument below one
    r = g.case2_rates(unit_cfg.with_(nt1=100.0), DpcParams(0.01, 0.01, 1.0))
    assert r.r11 == 0.0 and r.clamped


def test_case2_best(unit_cfg):
    assert g.case2_best(unit_cfg, 0.0).r1_star == 0.0


def test_case2_best_grid_refinement(unit_cfg):
    c = unit_cfg.with_(d_y1=2.0, d_z1=0.5, delta=2.0)
    alpha = 0.6
    coarse = g.case2_best(c, alpha)
    bb, ll = np.meshgrid(np.linspace(0, 1, 1001), np.linspace(0, 1, 1001), indexing="ij")
    r = g.case2_rates(c, alpha=alpha, beta=bb, lam=ll)
    fine = float(np.minimum(r.r11, r.r12).max())
    assert coarse.r1_star == pytest.approx(fine, abs=1e-3)
    assert coarse.r2_star == pytest.approx(g.case2_rates(c, alpha=alpha, beta=coarse.beta_star, lam=0.0).r2, abs=1e-12)


def test_case2_flat_lambda_tie(unit_cfg):
    # at beta = 0 nothing is sent to user 1 and every lambda is equally good
    vals = [g.case2_rates(unit_cfg, DpcParams(0.5, 0.0, lam)).r11 for lam in (0.0, 0.5, 1.0)]
    assert vals == [0.0, 0.0, 0.0]
    c = unit_cfg.with_(d_z1=1e6, nt1=1e6)
    best = g.case2_best(c, 0.5)
    if best.r1_star == 0.0:
        assert best.beta_star == 0.0 and best.lambda_star == 0.0


def test_common_rate_bounds(unit_cfg):
    r = g.common_rate_bounds(unit_cfg, 1.0)
    assert r.r_df_relay == pytest.approx(0.5 * LOG2(11), abs=1e-12)
    assert r.r_cf == pytest.approx(0.5 * LOG2(1 + 10 + 10 / 3.1), abs=1e-12)
    assert g.common_rate_bounds(unit_cfg, 0.0).r_df_relay == 0.0
    assert g.common_rate_bounds(unit_cfg, 0.3).r_cf == r.r_cf
    assert g.common_rate_bounds(unit_cfg, 0.0).r_df_direct == pytest.approx(C(10 + 10 + 2 * 10), abs=1e-12)


def test_cf_equals_classical_cf():
    for c in [fig4_config(0.3), fig4_config(0.6, delta=2.0)]:
        nh = g.compression_noise(c).n_hat2
        classical = C(c.p / (c.d_y2 ** c.delta * c.n2) + c.p / (c.d_z2 ** c.delta * (nh + c.nt2)))
        assert g.common_rate_bounds(c, 0.5).r_cf == pytest.approx(classical, abs=1e-12)


def test_common_rate_lower_cf_dominates(unit_cfg):
    c = unit_cfg.with_(d_z2=5.0, d_y2=5.0, d_z2y2=5.0)
    r0, _ = g.common_rate_lower(c)
    assert r0 == g.cf_rate(c)
    assert corollary2_common_rate(*g.common_rate_bounds(c, 0.5)) <= r0


def test_common_rate_lower_interior_beta(unit_cfg):
    c = unit_cfg.with_(d_z1=0.05, d_y1=1.0, d_z1y1=1.0, delta=1.0, d_z2=0.1, d_z2y2=0.1)
    r0, beta = g.common_rate_lower(c)

    def df(b):
        x = g.common_rate_bounds(c, b)
        return min(x.r_df_relay, x.r_df_direct)

    oracle = _grid_best_beta(df)
    assert 0 < beta < 1
    assert r0 == pytest.approx(min(oracle, g.cf_rate(c)), abs=1e-4)


def test_common_rate_lower_vanishes_with_power(unit_cfg):
    r0, _ = g.common_rate_lower(unit_cfg.with_(p=1e-12))
    assert r0 < 1e-10


def test_cutset_unit(unit_cfg):
    upper, b1, b2 = g.cutset_upper(unit_cfg)
    assert g.cutset_terms(unit_cfg, 1.0, 1.0) == pytest.approx(0.5 * LOG2(21), abs=1e-12)
    assert upper >= 0.5 * LOG2(21) - 1e-12
    assert upper == pytest.approx(2.19616, abs=1e-5)


def test_cutset_grid_oracle(unit_cfg):
    c = unit_cfg.with_(d_z1=0.4, d_y1=1.5, d_z2=0.8, d_z2y2=0.3, delta=2.0, p1=4.0)
    axis = np.linspace(0, 1, 401)
    b1, b2 = np.meshgrid(axis, axis, indexing="ij")
    oracle = float(np.max(g.cutset_terms(c, b1, b2)))
    upper, _, _ = g.cutset_upper(c)
    assert upper >= oracle - 1e-9
    assert upper == pytest.approx(oracle, abs=1e-3)


def test_cutset_without_relay_power(unit_cfg):
    c = unit_cfg.with_(p1=1e-12, p2=1e-12, d_y1=2.0, d_y2=1.5, delta=2.0)
    upper, _, _ = g.cutset_upper(c)
    no_relay = min(C(c.p / (4.0 * c.n1)), C(c.p / (2.25 * c.n2)))
    assert upper == pytest.approx(no_relay, abs=1e-5)


def test_rates_monotone_in_power(unit_cfg):
    c0 = unit_cfg.with_(d_y1=2.0, d_z1=0.7, d_z1y1=1.2, d_z2=0.8, d_z2y2=0.3, delta=2.0)
    prev = None
    for p in np.logspace(-2, 3, 25):
        c = c0.with_(p=float(p))
        vals = np.array([
            g.common_rate_lower(c)[0],
            g.cutset_upper(c)[0],
            g.cf_rate(c, 2),
            g.cf_rate(c, 1),
            g.df_rate(c, 1)[0],
            *g.common_rate_bounds(c, 0.4),
            g.case1_rates(c, alpha=0.4, beta=0.6).r2,
            g.case1_rates(c, alpha=0.4, beta=0.6).r1_relay,
            g.case2_rates(c, alpha=0.4, beta=0.6, lam=0.5).r2,
        ])
        if prev is not None:
            assert np.all(vals >= prev - 1e-12)
        prev = vals


configs = st.builds(
    GaussianBrcConfig,
    *[st.floats(0.1, 100) for _ in range(3)],
    *[st.floats(0.1, 10) for _ in range(4)],
    *[st.floats(0.05, 5) for _ in range(6)],
    delta=st.sampled_from([0.0, 1.0, 2.0, 3.0]),
)
unit_interval = st.floats(0, 1)


@settings(max_examples=100, deadline=None)
@given(configs, unit_interval, unit_interval, unit_interval)
def test_rates_non_negative_and_finite(c, a, b, lam):
    r1 = g.case1_rates(c, DpcParams(a, b))
    r2 = g.case2_rates(c, DpcParams(a, b, lam))
    vals = [r1.r1_relay, r1.r1_direct, r1.r2, r2.r11, r2.r12, r2.r2, *g.common_rate_bounds(c, b)]
    assert all(math.isfinite(v) and v >= 0 for v in vals)


@settings(max_examples=30, deadline=None)
@given(configs)
def test_upper_dominates_lower(c):
    assert g.cutset_upper(c)[0] >= g.common_rate_lower(c)[0] - 1e-9


def test_config_json(tmp_path, unit_cfg):
    doc = unit_cfg.to_dict()
    del doc["delta"], doc["unit"]
    c = GaussianBrcConfig.from_dict(doc)
    assert c.delta == 2.0 and c.unit.value == "bits"
    missing = dict(doc)
    del missing["p2"]
    with pytest.raises(ConfigError) as exc:
        GaussianBrcConfig.from_dict(missing)
    assert exc.value.field == "p2"
    with pytest.raises(ConfigError) as exc:
        GaussianBrcConfig.from_dict({**doc, "extra": 1})
    assert exc.value.field == "extra"
    with pytest.raises(ConfigError) as exc:
        GaussianBrcConfig.from_dict({**doc, "d_z1": -1})
    assert exc.value.field == "d_z1"
    path = tmp_path / "c.json"
    path.write_text(json.dumps({**doc, "unit": "nats"}))
    loaded = GaussianBrcConfig.load(path)
    assert loaded.unit.value == "nats"
    assert g.cf_rate(loaded) == pytest.approx(g.cf_rate(unit_cfg) * math.log(2), abs=1e-12)


def test_dpc_params_validation():
    with pytest.raises(ValueError):
        DpcParams(1.2, 0.0)
