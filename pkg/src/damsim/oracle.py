"""Symbol-level time-domain simulator used to validate the analytic rates.

This module never looks at the delay-difference grouping. It builds the
transmitted waveform by actually shifting symbol streams, runs it through
the tapped multipath channel, and then attributes the received signal to
(stream, total delay) components by linear regression. Agreement with
:func:`damsim.core.analytic_sinr` is therefore evidence that the grouping
bookkeeping is right, not a restatement of it.
"""

from __future__ import annotations

import numpy as np

from .channel import ScenarioChannel
from .core import BeamformerSet, DelaySchedule, RateReport

__all__ = ["simulate_time_domain"]


def _draw_streams(rng, num_ues: int, num_symbols: int, kind: str) -> list:
    if kind == "gaussian":
        return [
            (rng.standard_normal(num_symbols) + 1j * rng.standard_normal(num_symbols))
            / np.sqrt(2.0)
            for _ in range(num_ues)
        ]
    if kind == "qpsk":
        points = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)
        return [rng.choice(points, size=num_symbols) for _ in range(num_ues)]
    raise ValueError("unknown symbol kind %r (expected 'gaussian' or 'qpsk')" % (kind,))


def simulate_time_domain(
    beams: BeamformerSet,
    channel: ScenarioChannel,
    schedule: DelaySchedule,
    noise_power: float = 0.0,
    num_symbols: int = 100_000,
    rng=None,
    lock_delays=None,
    symbol_kind: str = "gaussian",
) -> RateReport:
    """Measure desired / ISI / IUI powers from an actual transmission.

    The transmitter sends ``x[n] = sum_{k,l} f_kl s_k[n - kappa_kl]`` and
    UE ``k`` receives ``y_k[n] = sum_l h_kl^H x[n - n_kl]`` plus optional
    noise. Every copy of stream ``k'`` reaches UE ``k`` at some total
    delay ``n_kl + kappa_k'l'``; the full set of such (stream, delay)
    candidates is enumerated by brute force and the received samples are
    regressed onto the correspondingly shifted streams. In the noiseless
    case the regression is exact, so the recovered coefficients equal the
    coherent per-delay sums whatever beamformers were used.

    Parameters
    ----------
    beams : BeamformerSet
        Per-path transmit vectors, shapes matching the channel.
    channel : ScenarioChannel
        Channel realization to transmit through.
    schedule : DelaySchedule
        Transmit-side delay offsets ``kappa`` (aligned or all-zero).
    noise_power : float
        Receiver noise variance. Zero gives the exact decomposition.
    num_symbols : int
        Stream length; longer runs tighten the sample-average powers.
    rng : None | int | numpy.random.Generator
        Randomness source for symbols and noise.
    lock_delays : sequence of int, optional
        Total delay each UE treats as its desired tap. Defaults to the
        latest own-stream copy arriving through its own offset path,
        which under an aligned schedule is the common delay every
        own-stream copy lands on.
    symbol_kind : str
        ``'gaussian'`` for CN(0, 1) streams or ``'qpsk'``.

    Returns
    -------
    RateReport
        Sample-average powers; ``residual`` holds the per-UE energy the
        regression could not explain (noise plus numerical error).
    """
    if beams.num_ues != channel.num_ues:
        raise ValueError("beamformer set and channel disagree on the number of UEs")
    num_ues = channel.num_ues
    num_tx = channel.matrix.shape[0]
    rng = np.random.default_rng(rng)

    streams = _draw_streams(rng, num_ues, num_symbols, symbol_kind)

    # transmitted waveform, each path's stream advanced by its offset
    x = np.zeros((num_tx, num_symbols), dtype=complex)
    for k2 in range(num_ues):
        for l2 in range(channel.ues[k2].num_paths):
            off = int(schedule.kappa[k2][l2])
            x[:, off:] += np.outer(beams.vectors[k2][:, l2], streams[k2][: num_symbols - off])

    desired = np.zeros(num_ues)
    isi = np.zeros(num_ues)
    iui = np.zeros(num_ues)
    residual = np.zeros(num_ues)

    for k in range(num_ues):
        ue = channel.ues[k]

        # received samples through the tapped channel
        y = np.zeros(num_symbols, dtype=complex)
        for l in range(ue.num_paths):
            tap = int(ue.delays[l])
            z = ue.steering[:, l].conj() @ x
            y[tap:] += z[: num_symbols - tap]
        if noise_power > 0.0:
            y += np.sqrt(noise_power / 2.0) * (
                rng.standard_normal(num_symbols) + 1j * rng.standard_normal(num_symbols)
            )

        # every (stream, total delay) the receiver could possibly see
        candidates = []
        for k2 in range(num_ues):
            totals = sorted(
                {
                    int(ue.delays[l] + schedule.kappa[k2][l2])
                    for l in range(ue.num_paths)
                    for l2 in range(channel.ues[k2].num_paths)
                }
            )
            candidates.extend((k2, d) for d in totals)

        start = max(d for (_, d) in candidates)
        if num_symbols - start < 10 * len(candidates):
            raise ValueError(
                "num_symbols=%d leaves too short a window after delay %d"
                % (num_symbols, start)
            )

        basis = np.stack(
            [streams[k2][start - d : num_symbols - d] for (k2, d) in candidates], axis=1
        )
        yw = y[start:]
        # normal equations: distinct shifts of independent streams keep the
        # Gram matrix near identity, so this is safe and much faster than
        # a full orthogonal factorization of the tall basis
        gram = basis.conj().T @ basis
        rhs = basis.conj().T @ yw
        try:
            coeff = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            coeff = np.linalg.lstsq(basis, yw, rcond=None)[0]

        if lock_delays is not None:
            lock = int(lock_delays[k])
        else:
            # latest own-stream copy arriving through its own offset path;
            # under an aligned schedule every such copy lands here
            lock = max(
                int(ue.delays[l] + schedule.kappa[k][l]) for l in range(ue.num_paths)
            )

        fit = np.zeros_like(yw)
        for j, (k2, d) in enumerate(candidates):
            comp = coeff[j] * basis[:, j]
            fit += comp
            power = float(np.mean(np.abs(comp) ** 2))
            if k2 == k and d == lock:
                desired[k] = power
            elif k2 == k:
                isi[k] += power
            else:
                iui[k] += power
        residual[k] = float(np.mean(np.abs(yw - fit) ** 2))

    return RateReport(
        desired=desired,
        isi=isi,
        iui=iui,
        noise_power=float(noise_power),
        residual=residual,
    )
