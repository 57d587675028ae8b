import numpy as np
import pytest

from damsim.channel import ScenarioConfig, generate_scenario
from damsim.core import analytic_sinr, build_grouping
from damsim.beamforming import assemble_zf, zf_directions
from damsim.power import asymptotic_mrt_alloc, waterfilling, zf_power_alloc


def waterfill_by_bisection(gains, total_power, noise_power):
    """Independent reference: bisect the water level."""
    inv = np.where(gains > 0, noise_power / np.maximum(gains, 1e-300), np.inf)
    lo, hi = 0.0, np.min(inv) + total_power + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(0.0, mid - inv)) > total_power:
            hi = mid
        else:
            lo = mid
    level = 0.5 * (lo + hi)
    return np.maximum(0.0, level - inv)


def test_known_two_channel_case():
    res = waterfilling(np.array([4.0, 1.0]), total_power=1.0, noise_power=1.0)
    assert np.allclose(res.powers, [0.875, 0.125])
    assert res.water_level == pytest.approx(1.125)
    assert res.active.tolist() == [True, True]


def test_weak_channel_shut_off():
    res = waterfilling(np.array([10.0, 0.01]), total_power=0.5, noise_power=1.0)
    assert res.powers[1] == 0.0
    assert res.powers[0] == pytest.approx(0.5)
    assert not res.active[1]


def test_kkt_conditions_on_random_instances():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = rng.integers(1, 9)
        gains = 10.0 ** rng.uniform(-3, 3, n)
        p = 10.0 ** rng.uniform(-2, 2)
        sigma = 10.0 ** rng.uniform(-3, 1)
        res = waterfilling(gains, p, sigma)
        assert np.all(res.powers >= 0.0)
        assert np.sum(res.powers) == pytest.approx(p, rel=1e-12)
        inv = sigma / gains
        # active channels sit on the level, inactive ones lie above it
        active = res.powers > 0
        assert np.allclose(res.powers[active] + inv[active], res.water_level, rtol=1e-10)
        assert np.all(inv[~active] >= res.water_level - 1e-12 * res.water_level)


def test_matches_bisection_reference():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = rng.integers(2, 7)
        gains = 10.0 ** rng.uniform(-2, 2, n)
        res = waterfilling(gains, 1.7, 0.3)
        ref = waterfill_by_bisection(gains, 1.7, 0.3)
        assert np.allclose(res.powers, ref, atol=1e-8)


def test_zero_gain_channels_allowed():
    res = waterfilling(np.array([0.0, 2.0, 0.0]), 1.0, 1.0)
    assert res.powers[0] == 0.0 and res.powers[2] == 0.0
    assert res.powers[1] == pytest.approx(1.0)


def test_input_validation():
    with pytest.raises(ValueError):
        waterfilling(np.array([1.0, -1.0]), 1.0, 1.0)
    with pytest.raises(ValueError):
        waterfilling(np.array([0.0, 0.0]), 1.0, 1.0)
    with pytest.raises(ValueError):
        waterfilling(np.array([1.0]), 0.0, 1.0)
    with pytest.raises(ValueError):
        waterfilling(np.array([1.0]), 1.0, 0.0)
    with pytest.raises(ValueError):
        waterfilling(np.array([[1.0]]), 1.0, 1.0)


def test_zf_power_alloc_predicts_analytic_sinr():
    cfg = ScenarioConfig(
        num_antennas=48,
        num_ues=2,
        paths_per_ue=(3, 4),
        transmit_power_w=1.3,
        noise_power_w=2e-4,
        max_delay=15,
        rng_seed=5,
    )
    ch = generate_scenario(cfg)
    dirs = zf_directions(ch)
    path_powers, alloc = zf_power_alloc(dirs, cfg.transmit_power_w, cfg.noise_power_w)
    for k in range(2):
        assert np.sum(path_powers[k]) == pytest.approx(alloc.powers[k], rel=1e-12)
    beams = assemble_zf(dirs, path_powers)
    rep = analytic_sinr(beams, build_grouping(ch), ch, cfg.noise_power_w)
    combined = np.array(
        [float(np.sum(1.0 / dirs.column_norms(k) ** 2)) for k in range(2)]
    )
    predicted = alloc.powers * combined / cfg.noise_power_w
    assert np.allclose(rep.sinr, predicted, rtol=1e-9)


def test_zf_alloc_beats_uniform_split():
    cfg = ScenarioConfig(
        num_antennas=48,
        num_ues=2,
        paths_per_ue=(3, 3),
        transmit_power_w=1.0,
        noise_power_w=5e-2,
        max_delay=15,
        rng_seed=9,
    )
    ch = generate_scenario(cfg)
    dirs = zf_directions(ch)
    path_powers, _ = zf_power_alloc(dirs, cfg.transmit_power_w, cfg.noise_power_w)
    grp = build_grouping(ch)
    best = analytic_sinr(assemble_zf(dirs, path_powers), grp, ch, cfg.noise_power_w)
    uniform = tuple(np.full(3, cfg.transmit_power_w / 6) for _ in range(2))
    base = analytic_sinr(assemble_zf(dirs, uniform), grp, ch, cfg.noise_power_w)
    assert float(np.sum(best.rates)) >= float(np.sum(base.rates)) - 1e-12


def test_asymptotic_mrt_alloc_uses_channel_energy():
    cfg = ScenarioConfig(
        num_antennas=64,
        num_ues=3,
        paths_per_ue=(2, 2, 2),
        transmit_power_w=1.0,
        noise_power_w=1e-3,
        max_delay=10,
        rng_seed=2,
    )
    ch = generate_scenario(cfg)
    powers, alloc = asymptotic_mrt_alloc(ch, cfg.transmit_power_w, cfg.noise_power_w)
    assert np.sum(powers) == pytest.approx(cfg.transmit_power_w)
    ref = waterfilling(
        np.array([ue.energy for ue in ch.ues]), cfg.transmit_power_w, cfg.noise_power_w
    )
    assert np.allclose(powers, ref.powers)
