import numpy as np
import pytest

from damsim.channel import ScenarioConfig, generate_scenario
from damsim.core import analytic_sinr, build_grouping, transmit_power, zero_schedule
from damsim.baseline import (
    StrongestPathSelection,
    baseline_sinr,
    select_strongest,
    sp_mrt,
    sp_rzf,
    sp_zf,
)
from damsim.oracle import simulate_time_domain
from helpers import make_channel


def scenario(seed, num_antennas=24, paths=(3, 2), power=1.0, noise=1e-2):
    cfg = ScenarioConfig(
        num_antennas=num_antennas,
        num_ues=len(paths),
        paths_per_ue=paths,
        transmit_power_w=power,
        noise_power_w=noise,
        max_delay=12,
        rng_seed=seed,
    )
    return cfg, generate_scenario(cfg)


def test_selection_picks_largest_norm():
    ch = make_channel(
        [[0, 3, 6], [1, 4]],
        num_antennas=4,
        gains=[[0.1, 2.0, 0.5], [1.0, 1.0]],
    )
    sel = select_strongest(ch)
    assert sel.indices[0] == 1
    # equal norms tie to the lowest index
    assert sel.indices[1] == 0
    assert sel.lock_delays(ch).tolist() == [3, 1]
    cols = sel.columns(ch)
    assert np.allclose(cols[:, 0], ch.ues[0].steering[:, 1])


def test_embedded_beams_are_zero_off_selection():
    cfg, ch = scenario(0)
    sel = select_strongest(ch)
    for beams in (
        sp_mrt(ch, sel, cfg.transmit_power_w, cfg.noise_power_w),
        sp_zf(ch, sel, cfg.transmit_power_w, cfg.noise_power_w),
        sp_rzf(ch, sel, cfg.transmit_power_w, cfg.noise_power_w)[0],
    ):
        for k, ue in enumerate(ch.ues):
            block = beams.vectors[k]
            for l in range(ue.num_paths):
                if l != sel.indices[k]:
                    assert np.all(block[:, l] == 0.0)
        assert transmit_power(beams) <= cfg.transmit_power_w * (1 + 1e-9)


def test_embedding_agrees_with_tap_geometry():
    # the per-path analytic report and the direct tap computation are
    # two routes to the same numbers for an embedded baseline set
    for seed in range(5):
        cfg, ch = scenario(seed)
        grp = build_grouping(ch)
        sel = select_strongest(ch)
        for beams in (
            sp_mrt(ch, sel, cfg.transmit_power_w, cfg.noise_power_w),
            sp_zf(ch, sel, cfg.transmit_power_w, cfg.noise_power_w),
            sp_rzf(ch, sel, cfg.transmit_power_w, cfg.noise_power_w)[0],
        ):
            direct = baseline_sinr(beams, sel, ch, cfg.noise_power_w)
            general = analytic_sinr(beams, grp, ch, cfg.noise_power_w)
            scale = max(np.max(direct.desired), 1e-30)
            assert np.allclose(direct.desired, general.desired, atol=1e-10 * scale)
            assert np.allclose(direct.isi, general.isi, atol=1e-10 * scale)
            assert np.allclose(direct.iui, general.iui, atol=1e-10 * scale)


def test_sp_zf_nulls_other_selected_paths():
    cfg, ch = scenario(3, num_antennas=32, paths=(4, 3, 2))
    sel = select_strongest(ch)
    beams = sp_zf(ch, sel, cfg.transmit_power_w, cfg.noise_power_w)
    cols = sel.columns(ch)
    for k in range(3):
        f = beams.vectors[k][:, sel.indices[k]]
        for k2 in range(3):
            resp = abs(np.vdot(cols[:, k2], f))
            if k2 != k:
                assert resp < 1e-10 * np.linalg.norm(cols[:, k2])


def test_sp_zf_rejects_dependent_selections():
    # both UEs share the same strongest direction, so the selected
    # columns are parallel
    ch = make_channel(
        [[0], [2]],
        num_antennas=8,
        gains=[[1.0], [0.5]],
        aods=[[1.0], [1.0]],
    )
    sel = select_strongest(ch)
    with pytest.raises(ValueError, match="dependen"):
        sp_zf(ch, sel, 1.0, 1e-2)


def test_sp_zf_rejects_too_few_antennas():
    ch = make_channel([[0], [2], [4]], num_antennas=2)
    sel = select_strongest(ch)
    with pytest.raises(ValueError, match="antennas"):
        sp_zf(ch, sel, 1.0, 1e-2)


def test_sp_rzf_trace_monotone():
    for seed in range(5):
        cfg, ch = scenario(seed, noise=2e-2)
        sel = select_strongest(ch)
        beams, trace = sp_rzf(ch, sel, cfg.transmit_power_w, cfg.noise_power_w)
        assert np.all(np.diff(trace) >= -1e-9)
        assert beams.scheme == "SP-RZF"


def test_time_domain_check_with_lock_override():
    # strongest-path transmission with no delay compensation: the
    # receiver locks to the selected tap and the oracle must reproduce
    # the tap-geometry decomposition
    cfg, ch = scenario(7, noise=1e-3)
    sel = select_strongest(ch)
    beams = sp_mrt(ch, sel, cfg.transmit_power_w, cfg.noise_power_w)
    ana = baseline_sinr(beams, sel, ch, cfg.noise_power_w)
    emp = simulate_time_domain(
        beams,
        ch,
        zero_schedule(ch),
        num_symbols=60_000,
        rng=1,
        lock_delays=sel.lock_delays(ch).tolist(),
    )
    scale = np.max(ana.desired)
    assert np.allclose(emp.desired, ana.desired, atol=0.03 * scale)
    assert np.allclose(emp.isi, ana.isi, atol=0.03 * scale)
    assert np.allclose(emp.iui, ana.iui, atol=0.03 * scale)


def test_handpicked_selection_override():
    cfg, ch = scenario(4)
    sel = StrongestPathSelection(indices=(0, 0))
    beams = sp_mrt(ch, sel, cfg.transmit_power_w, cfg.noise_power_w)
    for k in range(2):
        block = beams.vectors[k]
        assert np.any(block[:, 0] != 0)
        assert np.all(block[:, 1:] == 0)
