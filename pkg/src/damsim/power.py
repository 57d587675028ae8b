"""Power allocation: exact water-filling and its beamformer-specific wrappers.

The water-filling solver is the single optimizer behind every scheme
that splits power across parallel single-tap subchannels: zero-forcing
(one subchannel per UE after path combining), asymptotic matched
filtering, and the strongest-path baselines. It solves the KKT system
exactly by sorting, no iteration or tolerance involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ScenarioChannel
from .beamforming import DirectionSet

__all__ = [
    "WaterfillingResult",
    "waterfilling",
    "zf_power_alloc",
    "asymptotic_mrt_alloc",
]


@dataclass(frozen=True)
class WaterfillingResult:
    """Solution of one water-filling problem.

    Attributes
    ----------
    powers : np.ndarray
        Optimal per-channel powers, summing to the power budget.
    water_level : float
        Common level ``mu``; every active channel satisfies
        ``powers[i] + noise_power / gains[i] == mu``.
    active : np.ndarray
        Boolean mask of channels that received positive power.
    """

    powers: np.ndarray
    water_level: float
    active: np.ndarray


def waterfilling(gains: np.ndarray, total_power: float, noise_power: float) -> WaterfillingResult:
    """Maximize ``sum log2(1 + p_i g_i / sigma^2)`` over ``p >= 0, sum p = P``.

    The optimum has the closed form ``p_i = max(0, mu - sigma^2 / g_i)``.
    Sorting the inverse gains makes the active set a prefix, and for a
    prefix of size ``m`` the level is ``mu = (P + sum_prefix) / m``; the
    solution is the largest prefix whose level still clears its worst
    member. That candidate is exact, so the returned powers satisfy the
    KKT conditions to machine precision.

    Parameters
    ----------
    gains : np.ndarray
        Nonnegative effective power gains. Zero-gain channels are legal
        and simply never activate.
    total_power : float
        Power budget ``P``, strictly positive.
    noise_power : float
        Noise variance ``sigma^2``, strictly positive.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.ndim != 1 or gains.size == 0:
        raise ValueError("gains must be a nonempty 1-D array")
    if np.any(gains < 0.0):
        raise ValueError("gains must be nonnegative")
    if not np.any(gains > 0.0):
        raise ValueError("at least one gain must be positive")
    if total_power <= 0.0 or noise_power <= 0.0:
        raise ValueError("total_power and noise_power must be positive")

    inv = np.full(gains.shape, np.inf)
    pos = gains > 0.0
    inv[pos] = noise_power / gains[pos]

    order = np.argsort(inv)
    csum = np.cumsum(inv[order])
    level = np.inf
    for m in range(int(np.sum(np.isfinite(inv))), 0, -1):
        level = (total_power + csum[m - 1]) / m
        if level > inv[order[m - 1]]:
            break

    powers = np.maximum(0.0, level - inv)
    powers[~np.isfinite(inv)] = 0.0
    return WaterfillingResult(powers=powers, water_level=float(level), active=powers > 0.0)


def zf_power_alloc(
    directions: DirectionSet, total_power: float, noise_power: float
) -> tuple[tuple[np.ndarray, ...], WaterfillingResult]:
    """Split the budget across UEs and paths for zero-forcing directions.

    Because ZF leaves no interference, UE ``k``'s SINR with per-path
    amplitudes ``t_kl`` on normalized directions is
    ``(sum_l t_kl / ||w_kl||)^2 / sigma^2``. For a fixed UE budget
    ``P_k`` that is maximized by ``t_k`` proportional to the inverse
    direction norms, giving SINR ``P_k ||q_k||^2 / sigma^2`` with
    ``q_kl = 1 / ||w_kl||``; the per-UE budgets then water-fill over the
    combined gains ``||q_k||^2``.

    Returns
    -------
    path_powers : tuple of np.ndarray
        ``path_powers[k][l] = t_kl^2``, summing to the UE budget.
    result : WaterfillingResult
        The per-UE water-filling solution over the combined gains.
    """
    if directions.kind != "zf":
        raise ValueError("expected zero-forcing directions, got %r" % directions.kind)
    q = [1.0 / directions.column_norms(k) for k in range(len(directions.columns))]
    combined = np.array([float(np.sum(qk**2)) for qk in q])
    result = waterfilling(combined, total_power, noise_power)
    path_powers = tuple(
        result.powers[k] * (qk / np.linalg.norm(qk)) ** 2 for k, qk in enumerate(q)
    )
    return path_powers, result


def asymptotic_mrt_alloc(
    channel: ScenarioChannel, total_power: float, noise_power: float
) -> tuple[np.ndarray, WaterfillingResult]:
    """Per-UE powers for matched filtering in the many-antenna regime.

    When interference vanishes the SINR of UE ``k`` is
    ``p_k ||hbar_k||^2 / sigma^2``, so the budget water-fills over the
    stacked channel energies.
    """
    energies = np.array([ue.energy for ue in channel.ues])
    result = waterfilling(energies, total_power, noise_power)
    return result.powers, result
