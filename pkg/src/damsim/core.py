"""Delay pre-compensation, delay-difference grouping, and analytic rates.

Delay alignment works by transmitting path ``l``'s copy of user ``k``'s
symbol stream ``kappa_kl = n_k_max - n_kl`` symbols early, so every path
arrives at the common delay ``n_k_max``. What interference remains is
organized by the *delay difference* ``i = n_kl - n_k'l'`` between an
arriving path and the reference path its stream was pre-delayed for: all
(path, path) combinations with the same difference add coherently in the
same received symbol slot. :class:`DelayGrouping` indexes those
combinations, and :func:`analytic_sinr` turns them into per-user
desired / ISI / IUI powers for any per-path beamformer set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ScenarioChannel

__all__ = [
    "DelaySchedule",
    "DelayGrouping",
    "BeamformerSet",
    "RateReport",
    "compensate_delays",
    "zero_schedule",
    "build_grouping",
    "transmit_power",
    "analytic_sinr",
    "sinr_report_forms",
    "sum_rate",
]


@dataclass(frozen=True)
class DelaySchedule:
    """Per-(UE, path) transmit-side delay offsets, in symbol durations."""

    kappa: tuple[np.ndarray, ...]  # kappa[k][l] >= 0, one zero per UE

    def max_offset(self) -> int:
        return int(max(k.max() for k in self.kappa))


def compensate_delays(channel: ScenarioChannel) -> DelaySchedule:
    """Align every path of each UE to that UE's maximum delay.

    ``kappa_kl = n_k_max - n_kl``; the latest path gets offset zero, and
    distinct per-UE delays make all offsets within a UE distinct.
    """
    kappa = []
    for ue in channel.ues:
        delays = ue.delays
        kappa.append((ue.n_max - delays).astype(int))
    return DelaySchedule(kappa=tuple(kappa))


def zero_schedule(channel: ScenarioChannel) -> DelaySchedule:
    """Schedule with no pre-compensation (plain single-carrier transmission)."""
    return DelaySchedule(kappa=tuple(np.zeros(ue.num_paths, dtype=int) for ue in channel.ues))


@dataclass
class DelayGrouping:
    """Delay-difference index structure for one channel realization.

    For each ordered UE pair ``(k, k')`` and difference ``i`` in
    ``[delta_min, delta_max]``, ``bins[(k, k')][i]`` lists the
    ``(l, l')`` path pairs with ``n_kl - n_k'l' == i``. For a fixed
    reference path ``l'`` at most one ``l`` can appear in a bin because
    delays are distinct within a UE. The self pair always has bin 0 equal
    to the diagonal pairs ``(l, l)``.
    """

    channel: ScenarioChannel = field(repr=False)
    delta_min: dict = field(repr=False)  # (k, k') -> int
    delta_max: dict = field(repr=False)  # (k, k') -> int
    bins: dict = field(repr=False)  # (k, k') -> {i: [(l, l'), ...]}

    def span(self, k: int, k2: int) -> int:
        return self.delta_max[(k, k2)] - self.delta_min[(k, k2)]

    def bin_range(self, k: int, k2: int) -> range:
        """All difference indices of the pair, boundary bins included."""
        return range(self.delta_min[(k, k2)], self.delta_max[(k, k2)] + 1)

    def effective_channel(self, k: int, k2: int, l2: int, i: int) -> np.ndarray:
        """Vector seen by UE ``k`` at offset ``i`` from reference path ``(k2, l2)``.

        Returns ``h_kl`` when some path ``l`` of UE ``k`` satisfies
        ``n_kl - n_k2,l2 == i``, else the zero vector.
        """
        for (l, lp) in self.bins[(k, k2)].get(i, ()):
            if lp == l2:
                return self.channel.ues[k].steering[:, l]
        return np.zeros(self.channel.matrix.shape[0], dtype=complex)

    def stacked_bin(self, k: int, k2: int, i: int) -> np.ndarray:
        """Effective channels of bin ``i`` stacked over the reference paths of UE ``k2``."""
        m = self.channel.matrix.shape[0]
        num_ref = self.channel.ues[k2].num_paths
        out = np.zeros(m * num_ref, dtype=complex)
        for (l, lp) in self.bins[(k, k2)].get(i, ()):
            out[lp * m : (lp + 1) * m] = self.channel.ues[k].steering[:, l]
        return out

    def pair_matrix(self, k: int, k2: int) -> np.ndarray:
        """Dense matrix of stacked bins, one column per difference index.

        Self pairs exclude the aligned bin ``i = 0`` (that one carries the
        desired signal, not interference), so they have ``span`` columns;
        cross pairs keep every index and have ``span + 1`` columns.
        """
        indices = [i for i in self.bin_range(k, k2) if not (k == k2 and i == 0)]
        m = self.channel.matrix.shape[0]
        num_ref = self.channel.ues[k2].num_paths
        out = np.zeros((m * num_ref, len(indices)), dtype=complex)
        for col, i in enumerate(indices):
            out[:, col] = self.stacked_bin(k, k2, i)
        return out


def build_grouping(channel: ScenarioChannel) -> DelayGrouping:
    """Group every (path, reference path) combination by delay difference."""
    num_ues = channel.num_ues
    delta_min: dict = {}
    delta_max: dict = {}
    bins: dict = {}
    for k in range(num_ues):
        dk = channel.ues[k].delays
        for k2 in range(num_ues):
            dk2 = channel.ues[k2].delays
            delta_min[(k, k2)] = int(dk.min() - dk2.max())
            delta_max[(k, k2)] = int(dk.max() - dk2.min())
            pair_bins: dict = {}
            for l2, d2 in enumerate(dk2):
                for l, d in enumerate(dk):
                    pair_bins.setdefault(int(d - d2), []).append((l, l2))
            bins[(k, k2)] = pair_bins
    return DelayGrouping(channel=channel, delta_min=delta_min, delta_max=delta_max, bins=bins)


@dataclass(frozen=True)
class BeamformerSet:
    """Per-path transmit beamforming vectors for one scheme.

    ``vectors[k]`` has shape ``(M_t, L_k)`` with column ``l`` the vector
    applied to path ``l`` of UE ``k``. Baseline (strongest-path) schemes
    fit the same container with all but one column zero.
    """

    scheme: str
    vectors: tuple[np.ndarray, ...]

    def stacked(self, k: int) -> np.ndarray:
        """Per-path vectors of UE ``k`` stacked into one long column."""
        return self.vectors[k].reshape(-1, order="F")

    @property
    def num_ues(self) -> int:
        return len(self.vectors)


def transmit_power(beams: BeamformerSet) -> float:
    """Total transmit power, the sum of squared beamformer norms.

    With unit-power i.i.d. symbol streams and distinct per-UE delay
    offsets, the cross terms of the transmitted signal average out and
    the radiated power is exactly this sum, independent of the offsets.
    """
    return float(sum(np.sum(np.abs(v) ** 2) for v in beams.vectors))


@dataclass(frozen=True)
class RateReport:
    """Per-UE SINR decomposition and the resulting achievable rates.

    ``residual`` is only set by the time-domain simulator: received
    energy its regression could not attribute to any known symbol stream
    (numerically zero when the model and simulator agree).
    """

    desired: np.ndarray
    isi: np.ndarray
    iui: np.ndarray
    noise_power: float
    residual: np.ndarray | None = None

    @property
    def sinr(self) -> np.ndarray:
        return self.desired / (self.isi + self.iui + self.noise_power)

    @property
    def rates(self) -> np.ndarray:
        return np.log2(1.0 + self.sinr)

    @property
    def num_ues(self) -> int:
        return len(self.desired)


def sum_rate(report: RateReport) -> float:
    """Sum of per-UE achievable rates in bps/Hz."""
    return float(np.sum(report.rates))


def _check_dimensions(beams: BeamformerSet, channel: ScenarioChannel) -> None:
    if beams.num_ues != channel.num_ues:
        raise ValueError("beamformer set and channel disagree on the number of UEs")
    for k, ue in enumerate(channel.ues):
        if beams.vectors[k].shape != ue.steering.shape:
            raise ValueError(
                "beamformer block %d has shape %r, channel expects %r"
                % (k, beams.vectors[k].shape, ue.steering.shape)
            )


def analytic_sinr(
    beams: BeamformerSet,
    grouping: DelayGrouping,
    channel: ScenarioChannel,
    noise_power: float,
) -> RateReport:
    """Exact desired / ISI / IUI powers of a beamformer set under alignment.

    With every path of UE ``k`` aligned to ``n_k_max``, the desired power
    is ``|sum_l h_kl^H f_kl|^2``; the self-pair bins at nonzero offsets
    carry ISI and every cross-pair bin carries IUI, each bin contributing
    the squared magnitude of its summed path coefficients.
    """
    _check_dimensions(beams, channel)
    num_ues = channel.num_ues
    desired = np.zeros(num_ues)
    isi = np.zeros(num_ues)
    iui = np.zeros(num_ues)
    for k in range(num_ues):
        hk = channel.ues[k].steering
        desired[k] = np.abs(np.sum(np.conj(hk) * beams.vectors[k])) ** 2
        for k2 in range(num_ues):
            cross = hk.conj().T @ beams.vectors[k2]  # (l, l') -> h_kl^H f_k2,l'
            for i, pairs in grouping.bins[(k, k2)].items():
                if k2 == k and i == 0:
                    continue
                coeff = sum(cross[l, lp] for (l, lp) in pairs)
                power = np.abs(coeff) ** 2
                if k2 == k:
                    isi[k] += power
                else:
                    iui[k] += power
    return RateReport(desired=desired, isi=isi, iui=iui, noise_power=float(noise_power))


def sinr_report_forms(
    beams: BeamformerSet,
    grouping: DelayGrouping,
    channel: ScenarioChannel,
    noise_power: float,
) -> tuple[RateReport, RateReport, RateReport]:
    """The same SINR decomposition through three redundant formulations.

    Returns reports computed (1) per reference path with materialized
    effective channels, (2) from stacked bin vectors, and (3) from the
    dense pair matrices. All three must agree to floating-point accuracy;
    disagreement means the grouping or stacking logic is broken.
    """
    _check_dimensions(beams, channel)
    num_ues = channel.num_ues
    desired = np.zeros(num_ues)
    isi = [np.zeros(num_ues) for _ in range(3)]
    iui = [np.zeros(num_ues) for _ in range(3)]

    for k in range(num_ues):
        hk = channel.ues[k].steering
        desired[k] = np.abs(np.sum(np.conj(hk) * beams.vectors[k])) ** 2

        for k2 in range(num_ues):
            fbar = beams.stacked(k2)

            # form 1: per-reference-path effective channels
            p1 = 0.0
            for i in grouping.bin_range(k, k2):
                if k2 == k and i == 0:
                    continue
                coeff = 0.0 + 0.0j
                for l2 in range(channel.ues[k2].num_paths):
                    g = grouping.effective_channel(k, k2, l2, i)
                    coeff += np.vdot(g, beams.vectors[k2][:, l2])
                p1 += np.abs(coeff) ** 2

            # form 2: stacked bin vectors
            p2 = 0.0
            for i in grouping.bin_range(k, k2):
                if k2 == k and i == 0:
                    continue
                p2 += np.abs(np.vdot(grouping.stacked_bin(k, k2, i), fbar)) ** 2

            # form 3: dense pair matrix
            g_mat = grouping.pair_matrix(k, k2)
            p3 = float(np.sum(np.abs(g_mat.conj().T @ fbar) ** 2))

            for form, p in enumerate((p1, p2, p3)):
                if k2 == k:
                    isi[form][k] += p
                else:
                    iui[form][k] += p

    return tuple(
        RateReport(desired=desired.copy(), isi=isi[f], iui=iui[f], noise_power=float(noise_power))
        for f in range(3)
    )
