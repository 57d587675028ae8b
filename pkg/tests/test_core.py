import numpy as np
import pytest

from damsim.channel import ScenarioConfig, generate_scenario
from damsim.core import (
    BeamformerSet,
    RateReport,
    analytic_sinr,
    build_grouping,
    compensate_delays,
    sinr_report_forms,
    sum_rate,
    transmit_power,
    zero_schedule,
)

from helpers import make_channel


def small_scenario(seed, num_antennas=16, paths=(3, 3), max_delay=15):
    cfg = ScenarioConfig(
        num_antennas=num_antennas,
        num_ues=len(paths),
        paths_per_ue=paths,
        transmit_power_w=1.0,
        noise_power_w=1e-3,
        max_delay=max_delay,
        rng_seed=seed,
    )
    return cfg, generate_scenario(cfg)


def random_beams(channel, rng, power=1.0):
    vectors = []
    for ue in channel.ues:
        v = rng.standard_normal(ue.steering.shape) + 1j * rng.standard_normal(ue.steering.shape)
        vectors.append(v)
    scale = np.sqrt(power / sum(np.sum(np.abs(v) ** 2) for v in vectors))
    return BeamformerSet(scheme="random", vectors=tuple(scale * v for v in vectors))


def test_compensate_delays_example():
    ch = make_channel([[3, 7, 5]], num_antennas=4)
    sched = compensate_delays(ch)
    assert sched.kappa[0].tolist() == [4, 0, 2]
    assert sched.max_offset() == 4


def test_compensate_delays_aligns_all_paths():
    for seed in range(5):
        _, ch = small_scenario(seed)
        sched = compensate_delays(ch)
        for k, ue in enumerate(ch.ues):
            totals = ue.delays + sched.kappa[k]
            assert np.all(totals == ue.n_max)
            assert sched.kappa[k].min() == 0


def test_zero_schedule():
    _, ch = small_scenario(1)
    sched = zero_schedule(ch)
    assert all(np.all(k == 0) for k in sched.kappa)


def test_grouping_single_ue_example():
    # delays 0 and 2: aligned bin pairs both paths, offsets +-2 isolate them
    ch = make_channel([[0, 2]], num_antennas=4)
    grp = build_grouping(ch)
    bins = grp.bins[(0, 0)]
    assert sorted(bins[0]) == [(0, 0), (1, 1)]
    assert bins[2] == [(1, 0)]
    assert bins[-2] == [(0, 1)]
    assert grp.delta_min[(0, 0)] == -2 and grp.delta_max[(0, 0)] == 2
    # self pair matrix skips the aligned bin: span columns
    mat = grp.pair_matrix(0, 0)
    assert mat.shape == (4 * 2, 4)


def test_grouping_pair_counts_and_bounds():
    for seed in range(8):
        _, ch = small_scenario(seed, paths=(3, 4))
        grp = build_grouping(ch)
        for k in range(2):
            for k2 in range(2):
                bins = grp.bins[(k, k2)]
                total = sum(len(v) for v in bins.values())
                assert total == ch.ues[k].num_paths * ch.ues[k2].num_paths
                dk, dk2 = ch.ues[k].delays, ch.ues[k2].delays
                assert grp.delta_min[(k, k2)] == dk.min() - dk2.max()
                assert grp.delta_max[(k, k2)] == dk.max() - dk2.min()
                for i, pairs in bins.items():
                    assert grp.delta_min[(k, k2)] <= i <= grp.delta_max[(k, k2)]
                    for l, lp in pairs:
                        assert dk[l] - dk2[lp] == i
                    # a reference path appears at most once per bin
                    refs = [lp for _, lp in pairs]
                    assert len(refs) == len(set(refs))


def test_grouping_self_bin_zero_is_diagonal():
    for seed in range(5):
        _, ch = small_scenario(seed)
        grp = build_grouping(ch)
        for k in range(ch.num_ues):
            diag = sorted(grp.bins[(k, k)][0])
            assert diag == [(l, l) for l in range(ch.ues[k].num_paths)]


def test_effective_channel_and_stacking():
    _, ch = small_scenario(3)
    grp = build_grouping(ch)
    m = ch.matrix.shape[0]
    for k in range(2):
        for k2 in range(2):
            for i in grp.bin_range(k, k2):
                stacked = grp.stacked_bin(k, k2, i)
                for l2 in range(ch.ues[k2].num_paths):
                    g = grp.effective_channel(k, k2, l2, i)
                    assert np.array_equal(stacked[l2 * m : (l2 + 1) * m], g)
                    # materialized vector is either zero or the named column
                    if np.any(g != 0.0):
                        diffs = ch.ues[k].delays - ch.ues[k2].delays[l2]
                        (l,) = np.nonzero(diffs == i)[0]
                        assert np.array_equal(g, ch.ues[k].steering[:, l])


def test_pair_matrix_shapes():
    for seed in range(5):
        _, ch = small_scenario(seed, paths=(2, 4))
        grp = build_grouping(ch)
        m = ch.matrix.shape[0]
        for k in range(2):
            for k2 in range(2):
                mat = grp.pair_matrix(k, k2)
                span = grp.span(k, k2)
                cols = span if k == k2 else span + 1
                assert mat.shape == (m * ch.ues[k2].num_paths, cols)


def test_transmit_power_accounting():
    rng = np.random.default_rng(0)
    _, ch = small_scenario(2)
    beams = random_beams(ch, rng, power=2.5)
    assert transmit_power(beams) == pytest.approx(2.5)
    assert beams.stacked(0).shape == (ch.matrix.shape[0] * ch.ues[0].num_paths,)


def test_analytic_sinr_desired_term():
    # with a single path and a matched beam the desired power is exact
    ch = make_channel([[4]], num_antennas=8, gains=[[1.5]])
    grp = build_grouping(ch)
    h = ch.ues[0].steering[:, 0]
    beams = BeamformerSet(scheme="t", vectors=(h[:, None] / np.linalg.norm(h),))
    rep = analytic_sinr(beams, grp, ch, noise_power=1e-2)
    assert rep.desired[0] == pytest.approx(float(np.linalg.norm(h) ** 2))
    assert rep.isi[0] == 0.0 and rep.iui[0] == 0.0
    assert rep.sinr[0] == pytest.approx(np.linalg.norm(h) ** 2 / 1e-2)


def test_three_forms_agree_on_random_beams():
    rng = np.random.default_rng(5)
    for seed in range(6):
        _, ch = small_scenario(seed, paths=(3, 2))
        grp = build_grouping(ch)
        beams = random_beams(ch, rng)
        ref = analytic_sinr(beams, grp, ch, 1e-3)
        forms = sinr_report_forms(beams, grp, ch, 1e-3)
        for rep in forms:
            assert np.allclose(rep.desired, ref.desired, rtol=1e-11)
            assert np.allclose(rep.isi, ref.isi, rtol=1e-11, atol=1e-250)
            assert np.allclose(rep.iui, ref.iui, rtol=1e-11, atol=1e-250)


def test_analytic_sinr_dimension_checks():
    _, ch = small_scenario(0)
    grp = build_grouping(ch)
    bad = BeamformerSet(scheme="bad", vectors=(np.zeros((4, 3), dtype=complex),) * 2)
    with pytest.raises(ValueError):
        analytic_sinr(bad, grp, ch, 1e-3)


def test_rate_report_and_sum_rate():
    rep = RateReport(
        desired=np.array([3.0, 1.0]),
        isi=np.array([0.5, 0.0]),
        iui=np.array([0.5, 0.0]),
        noise_power=0.5,
    )
    assert np.allclose(rep.sinr, [2.0, 2.0])
    assert np.allclose(rep.rates, [np.log2(3.0)] * 2)
    assert sum_rate(rep) == pytest.approx(2 * np.log2(3.0))
    assert rep.num_ues == 2
