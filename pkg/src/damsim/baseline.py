"""Strongest-path benchmark: single-tap transmission without alignment.

The benchmark transmitter picks each UE's strongest path, beamforms on
that path only, and applies no delay pre-compensation. The receiver
locks to the strongest path's delay, so every other path of its own
channel turns into ISI and every path carries IUI from the other
streams. Beamformer sets are returned in the same per-path container as
the aligned schemes, with all columns except the selected one zero;
that makes every downstream rate computation and the time-domain
simulator apply unchanged.

:func:`baseline_sinr` computes the same decomposition directly from the
strongest-path geometry, without the delay-difference machinery, as an
internal cross-check of the embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ScenarioChannel
from .core import BeamformerSet, RateReport
from .power import waterfilling
from .sca import SinrData, _ri_columns, sca_power_allocation

__all__ = [
    "StrongestPathSelection",
    "select_strongest",
    "sp_mrt",
    "sp_zf",
    "sp_rzf",
    "build_sp_sinr_data",
    "baseline_sinr",
]


@dataclass(frozen=True)
class StrongestPathSelection:
    """Index of the selected (strongest) path per UE."""

    indices: tuple[int, ...]

    def lock_delays(self, channel: ScenarioChannel) -> np.ndarray:
        """Receiver lock delays: each UE listens at its selected path's tap."""
        return np.array(
            [int(channel.ues[k].delays[l]) for k, l in enumerate(self.indices)]
        )

    def columns(self, channel: ScenarioChannel) -> np.ndarray:
        """Selected channel vectors stacked as a (M_t, K) matrix."""
        return np.stack(
            [channel.ues[k].steering[:, l] for k, l in enumerate(self.indices)], axis=1
        )


def select_strongest(channel: ScenarioChannel) -> StrongestPathSelection:
    """Pick the largest-norm path of each UE, lowest index on ties."""
    return StrongestPathSelection(
        indices=tuple(
            int(np.argmax(np.linalg.norm(ue.steering, axis=0))) for ue in channel.ues
        )
    )


def _embed(
    channel: ScenarioChannel,
    selection: StrongestPathSelection,
    per_ue: list[np.ndarray],
    scheme: str,
) -> BeamformerSet:
    vectors = []
    for k, ue in enumerate(channel.ues):
        block = np.zeros_like(ue.steering)
        block[:, selection.indices[k]] = per_ue[k]
        vectors.append(block)
    return BeamformerSet(scheme=scheme, vectors=tuple(vectors))


def sp_mrt(
    channel: ScenarioChannel,
    selection: StrongestPathSelection,
    total_power: float,
    noise_power: float,
) -> BeamformerSet:
    """Match each UE's strongest path, water-filling the budget across UEs."""
    cols = selection.columns(channel)
    gains = np.linalg.norm(cols, axis=0) ** 2
    alloc = waterfilling(gains, total_power, noise_power)
    per_ue = [
        np.sqrt(alloc.powers[k]) * cols[:, k] / np.sqrt(gains[k])
        for k in range(channel.num_ues)
    ]
    return _embed(channel, selection, per_ue, "SP-MRT")


def sp_zf(
    channel: ScenarioChannel,
    selection: StrongestPathSelection,
    total_power: float,
    noise_power: float,
) -> BeamformerSet:
    """Zero-force across the selected paths only.

    Directions come from the selected-column matrix ``D`` as
    ``W = D (D^H D)^{-1}``, so UE ``k``'s beam has unit response on its
    own selected path and none on the other UEs' selected paths. The
    budget water-fills over the resulting effective gains
    ``1 / ||w_k||^2``.
    """
    cols = selection.columns(channel)
    m, num_ues = cols.shape
    if m < num_ues:
        raise ValueError("needs at least as many antennas as UEs")
    q, r = np.linalg.qr(cols, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.min() < 1e-10 * diag.max():
        raise ValueError("selected paths are linearly dependent; zero-forcing is infeasible")
    w = q @ np.linalg.inv(r).conj().T
    norms = np.linalg.norm(w, axis=0)
    alloc = waterfilling(1.0 / norms**2, total_power, noise_power)
    per_ue = [
        np.sqrt(alloc.powers[k]) * w[:, k] / norms[k] for k in range(num_ues)
    ]
    return _embed(channel, selection, per_ue, "SP-ZF")


def build_sp_sinr_data(
    channel: ScenarioChannel,
    selection: StrongestPathSelection,
    directions: np.ndarray,
    total_power: float,
    noise_power: float,
) -> SinrData:
    """SINR description for one amplitude per UE on fixed directions.

    ``directions`` holds unit-norm columns, one per UE. Receiver ``k``
    locks to its selected path; within a UE the delays are distinct, so
    every (receive path, transmit stream) product lands in its own tap
    and the bins are all singletons.
    """
    num_ues = channel.num_ues
    desired = []
    self_isi = []
    cross: dict = {}
    for k in range(num_ues):
        sel = selection.indices[k]
        hk = channel.ues[k].steering
        for k2 in range(num_ues):
            proj = hk.conj().T @ directions[:, k2]  # per receive path
            if k2 == k:
                desired.append(_ri_columns([proj[sel : sel + 1]], 1))
                others = [proj[l : l + 1] for l in range(hk.shape[1]) if l != sel]
                self_isi.append(_ri_columns(others, 1))
            else:
                cross[(k, k2)] = _ri_columns(
                    [proj[l : l + 1] for l in range(hk.shape[1])], 1
                )
    return SinrData(
        desired=tuple(desired),
        self_isi=tuple(self_isi),
        cross=cross,
        total_power=float(total_power),
        noise_power=float(noise_power),
    )


def sp_rzf(
    channel: ScenarioChannel,
    selection: StrongestPathSelection,
    total_power: float,
    noise_power: float,
    epsilon: float | None = None,
    rel_tol: float = 1e-3,
    max_iters: int = 50,
) -> tuple[BeamformerSet, np.ndarray]:
    """Regularized ZF over the selected paths with optimized amplitudes.

    The regularizer defaults to ``K sigma^2 / P`` (one effective path
    per UE). Amplitudes run through the same successive convex
    approximation as the aligned schemes, driven by the strongest-path
    SINR description.
    """
    cols = selection.columns(channel)
    num_ues = cols.shape[1]
    if epsilon is None:
        epsilon = num_ues * noise_power / total_power
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    u, s, vh = np.linalg.svd(cols, full_matrices=False)
    f = (u * (s / (s**2 + epsilon))) @ vh
    norms = np.linalg.norm(f, axis=0)
    if norms.min() == 0.0:
        raise ValueError("regularized inverse produced a zero column")
    directions = f / norms
    data = build_sp_sinr_data(channel, selection, directions, total_power, noise_power)
    amplitudes, _, trace = sca_power_allocation(data, rel_tol=rel_tol, max_iters=max_iters)
    per_ue = [amplitudes[k][0] * directions[:, k] for k in range(num_ues)]
    return _embed(channel, selection, per_ue, "SP-RZF"), trace


def baseline_sinr(
    beams: BeamformerSet,
    selection: StrongestPathSelection,
    channel: ScenarioChannel,
    noise_power: float,
) -> RateReport:
    """Rates of a strongest-path set, straight from the tap geometry.

    Receiver ``k`` takes its selected path's tap as desired; its
    remaining paths are ISI and all paths carrying other streams are
    IUI. Independent of the delay-difference grouping, which makes it a
    cross-check on embedding baseline sets in the per-path container.
    """
    num_ues = channel.num_ues
    desired = np.zeros(num_ues)
    isi = np.zeros(num_ues)
    iui = np.zeros(num_ues)
    for k in range(num_ues):
        sel = selection.indices[k]
        hk = channel.ues[k].steering
        for k2 in range(num_ues):
            f = beams.vectors[k2][:, selection.indices[k2]]
            taps = np.abs(hk.conj().T @ f) ** 2
            if k2 == k:
                desired[k] = taps[sel]
                isi[k] = float(np.sum(taps)) - taps[sel]
            else:
                iui[k] += float(np.sum(taps))
    return RateReport(desired=desired, isi=isi, iui=iui, noise_power=float(noise_power))
