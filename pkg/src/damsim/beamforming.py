"""Per-path transmit beamformers: MRT, zero-forcing, regularized ZF.

All constructions here work on the path-stacked channel matrix ``H``
whose ``L_tot`` columns are the per-path vectors ``h_kl`` in UE-major,
path-minor order. ZF inverts ``H^H H`` through a QR factorization and
RZF regularizes it through an SVD; neither ever forms the Gram matrix
explicitly, which keeps both usable at the ill-conditioned path
geometries random angle draws occasionally produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ScenarioChannel
from .core import BeamformerSet

__all__ = [
    "DirectionSet",
    "mrt",
    "mrt_asymptotic",
    "zf_directions",
    "assemble_zf",
    "rzf_directions",
    "default_rzf_epsilon",
    "assemble_scaled",
]

_RANK_TOL = 1e-10


@dataclass(frozen=True)
class DirectionSet:
    """Unscaled per-path beamforming directions.

    ``kind`` records the normalization contract: ``'zf'`` columns satisfy
    ``h_kl^H w_kl = 1`` (and zero response on every other path), while
    ``'rzf'`` columns have unit norm. ``columns[k]`` has shape
    ``(M_t, L_k)``.
    """

    kind: str
    columns: tuple[np.ndarray, ...]

    def column_norms(self, k: int) -> np.ndarray:
        return np.linalg.norm(self.columns[k], axis=0)


def _split_by_ue(channel: ScenarioChannel, flat: np.ndarray) -> tuple[np.ndarray, ...]:
    return tuple(flat[:, channel.column_slice(k)] for k in range(channel.num_ues))


def mrt(channel: ScenarioChannel, total_power: float) -> BeamformerSet:
    """Matched filtering with a single global power normalization.

    ``f_kl = sqrt(P) h_kl / ||H||_F``, so stronger paths get more power
    and the total transmit power is exactly ``P``.
    """
    if total_power <= 0.0:
        raise ValueError("total_power must be positive")
    fro = np.linalg.norm(channel.matrix)
    if fro == 0.0:
        raise ValueError("channel matrix is identically zero")
    scale = np.sqrt(total_power) / fro
    return BeamformerSet(
        scheme="DAM-MRT",
        vectors=tuple(scale * ue.steering for ue in channel.ues),
    )


def mrt_asymptotic(channel: ScenarioChannel, ue_powers: np.ndarray) -> BeamformerSet:
    """Matched filtering with explicit per-UE powers.

    ``f_kl = sqrt(p_k) h_kl / ||hbar_k||`` spends power ``p_k`` on UE
    ``k``; with many antennas the paths decorrelate and the SINR tends to
    ``p_k ||hbar_k||^2 / sigma^2``, which is what the accompanying
    water-filling allocation optimizes.
    """
    ue_powers = np.asarray(ue_powers, dtype=float)
    if ue_powers.shape != (channel.num_ues,):
        raise ValueError("need one power per UE")
    if np.any(ue_powers < 0.0):
        raise ValueError("UE powers must be nonnegative")
    vectors = []
    for k, ue in enumerate(channel.ues):
        norm = np.sqrt(ue.energy)
        if norm == 0.0:
            raise ValueError("UE %d has a zero channel" % k)
        vectors.append(np.sqrt(ue_powers[k]) / norm * ue.steering)
    return BeamformerSet(scheme="DAM-MRT-asym", vectors=tuple(vectors))


def zf_directions(channel: ScenarioChannel) -> DirectionSet:
    """Directions that null every path except their own.

    Computes ``W = H (H^H H)^{-1}`` from the thin QR factorization
    ``H = Q R`` as ``W = Q R^{-H}``, which conjugate-transposes to
    ``H^H W = I``. Requires at least as many antennas as total paths and
    a numerically full-rank ``H``.
    """
    m, l_tot = channel.matrix.shape
    if m < l_tot:
        raise ValueError(
            "zero-forcing needs num_antennas >= total paths (%d < %d)" % (m, l_tot)
        )
    q, r = np.linalg.qr(channel.matrix, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.min() < _RANK_TOL * diag.max():
        raise ValueError("channel matrix is rank deficient; zero-forcing is infeasible")
    w = q @ np.linalg.inv(r).conj().T
    return DirectionSet(kind="zf", columns=_split_by_ue(channel, w))


def assemble_zf(directions: DirectionSet, path_powers: tuple[np.ndarray, ...]) -> BeamformerSet:
    """Scale ZF directions so path ``(k, l)`` radiates ``path_powers[k][l]``.

    ``f_kl = t_kl w_kl / ||w_kl||`` with ``t_kl = sqrt(path_powers[k][l])``;
    the unit effective gain of the directions then makes the received
    amplitude ``t_kl / ||w_kl||`` exactly.
    """
    if directions.kind != "zf":
        raise ValueError("expected zero-forcing directions, got %r" % directions.kind)
    vectors = []
    for k, cols in enumerate(directions.columns):
        t = np.sqrt(np.asarray(path_powers[k], dtype=float))
        vectors.append(cols / np.linalg.norm(cols, axis=0) * t)
    return BeamformerSet(scheme="DAM-ZF", vectors=tuple(vectors))


def default_rzf_epsilon(channel: ScenarioChannel, total_power: float, noise_power: float) -> float:
    """Regularization matched to the operating SNR, ``L_tot sigma^2 / P``."""
    if total_power <= 0.0 or noise_power <= 0.0:
        raise ValueError("powers must be positive")
    return channel.total_paths * noise_power / total_power


def rzf_directions(channel: ScenarioChannel, epsilon: float) -> DirectionSet:
    """Unit-norm columns of the regularized inverse ``H (H^H H + eps I)^{-1}``.

    Evaluated through the thin SVD ``H = U S V^H`` as
    ``U diag(s / (s^2 + eps)) V^H``, defined for any ``eps > 0`` even
    when ``H`` is rank deficient or wide.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    u, s, vh = np.linalg.svd(channel.matrix, full_matrices=False)
    f = (u * (s / (s**2 + epsilon))) @ vh
    norms = np.linalg.norm(f, axis=0)
    if norms.min() == 0.0:
        raise ValueError("regularized inverse produced a zero column")
    return DirectionSet(kind="rzf", columns=_split_by_ue(channel, f / norms))


def assemble_scaled(
    directions: DirectionSet, amplitudes: tuple[np.ndarray, ...], scheme: str
) -> BeamformerSet:
    """Attach per-path amplitudes to unit-norm directions.

    ``f_kl = a_kl w_kl`` with ``a_kl >= 0``; the radiated power is
    ``sum a_kl^2``.
    """
    if directions.kind != "rzf":
        raise ValueError("expected unit-norm directions, got %r" % directions.kind)
    vectors = []
    for k, cols in enumerate(directions.columns):
        a = np.asarray(amplitudes[k], dtype=float)
        if np.any(a < 0.0):
            raise ValueError("amplitudes must be nonnegative")
        vectors.append(cols * a)
    return BeamformerSet(scheme=scheme, vectors=tuple(vectors))
