"""Random multi-user multipath mmWave channels with ULA steering vectors.

The transmitter is a half-wavelength uniform linear array (ULA) with
``num_antennas`` elements serving ``num_ues`` single-antenna users. Each
user's channel is a sparse tapped delay line: path ``l`` of user ``k``
carries a complex gain, an angle of departure (AoD), and an integer delay
measured in symbol durations. The per-path spatial signature is
``alpha * a(theta)`` where ``a`` is the ULA array response.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ScenarioConfig",
    "PathParams",
    "UeChannel",
    "ScenarioChannel",
    "array_response",
    "generate_scenario",
    "asymptotic_correlation",
    "ula_correlation",
    "dbm_to_watts",
    "watts_to_dbm",
]


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level from dBm to watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    """Convert a power level from watts to dBm."""
    if p_watts <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * np.log10(p_watts) + 30.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Static description of one simulated scenario.

    Parameters
    ----------
    num_antennas : int
        Number of transmit antenna elements (ULA).
    num_ues : int
        Number of single-antenna users.
    paths_per_ue : tuple of int
        Number of temporally resolvable multipaths for each user.
    transmit_power_w : float
        Total transmit power budget in watts.
    noise_power_w : float
        Receiver noise power in watts (same for every user).
    max_delay : int
        Integer delays are drawn uniformly without replacement from
        ``{0, ..., max_delay}`` independently per user.
    aod_range_deg : tuple of float
        AoDs are drawn i.i.d. uniform from this interval, in degrees.
    gain_scale : float
        Linear power scale applied to every path gain variance. Models
        large-scale pathloss; 1.0 keeps unit average channel energy per
        user.
    rng_seed : int
        Seed that makes :func:`generate_scenario` deterministic.
    """

    num_antennas: int
    num_ues: int
    paths_per_ue: tuple[int, ...]
    transmit_power_w: float
    noise_power_w: float
    max_delay: int = 40
    aod_range_deg: tuple[float, float] = (-90.0, 90.0)
    gain_scale: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "paths_per_ue", tuple(int(l) for l in self.paths_per_ue))
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.num_ues < 1:
            raise ValueError("num_ues must be >= 1")
        if len(self.paths_per_ue) != self.num_ues:
            raise ValueError("paths_per_ue must list one path count per UE")
        if any(l < 1 for l in self.paths_per_ue):
            raise ValueError("every UE needs at least one path")
        if self.transmit_power_w <= 0:
            raise ValueError("transmit_power_w must be positive")
        if self.noise_power_w <= 0:
            raise ValueError("noise_power_w must be positive")
        if self.max_delay < 0:
            raise ValueError("max_delay must be non-negative")
        if self.max_delay + 1 < max(self.paths_per_ue):
            raise ValueError(
                "delay range [0, %d] is too narrow to draw %d distinct delays"
                % (self.max_delay, max(self.paths_per_ue))
            )
        if self.gain_scale <= 0:
            raise ValueError("gain_scale must be positive")
        lo, hi = self.aod_range_deg
        if not lo < hi:
            raise ValueError("aod_range_deg must be a nonempty interval")

    @property
    def total_paths(self) -> int:
        return int(sum(self.paths_per_ue))


@dataclass(frozen=True)
class PathParams:
    """One multipath component: complex gain, AoD (radians), integer delay."""

    gain: complex
    aod: float
    delay: int


@dataclass(frozen=True)
class UeChannel:
    """All multipath parameters of one user plus derived spatial signatures.

    ``steering`` holds the per-path channel vectors ``h_kl`` as columns,
    in the same order as ``paths``.
    """

    paths: tuple[PathParams, ...]
    steering: np.ndarray  # (M_t, L_k) complex, column l = gain_l * a(aod_l)

    @property
    def num_paths(self) -> int:
        return len(self.paths)

    @property
    def delays(self) -> np.ndarray:
        return np.array([p.delay for p in self.paths], dtype=int)

    @property
    def n_min(self) -> int:
        return int(min(p.delay for p in self.paths))

    @property
    def n_max(self) -> int:
        return int(max(p.delay for p in self.paths))

    @property
    def stacked(self) -> np.ndarray:
        """Per-path vectors stacked into one column of length M_t * L_k."""
        return self.steering.reshape(-1, order="F")

    @property
    def energy(self) -> float:
        """Total channel energy, the squared norm of the stacked vector."""
        return float(np.sum(np.abs(self.steering) ** 2))


@dataclass(frozen=True)
class ScenarioChannel:
    """One channel realization for every user in the scenario.

    ``matrix`` stacks all per-path vectors as columns in UE-major,
    path-minor order.
    """

    config: ScenarioConfig
    ues: tuple[UeChannel, ...]
    matrix: np.ndarray = field(repr=False)  # (M_t, L_tot) complex

    @property
    def num_ues(self) -> int:
        return len(self.ues)

    @property
    def total_paths(self) -> int:
        return self.matrix.shape[1]

    def column_offset(self, ue: int) -> int:
        """Index of UE ``ue``'s first column inside ``matrix``."""
        return int(sum(u.num_paths for u in self.ues[:ue]))

    def column_slice(self, ue: int) -> slice:
        start = self.column_offset(ue)
        return slice(start, start + self.ues[ue].num_paths)


def array_response(theta: float, num_antennas: int) -> np.ndarray:
    """ULA array response for AoD ``theta`` (radians), half-wavelength spacing.

    Element ``m`` equals ``exp(-1j * pi * m * cos(theta))``, so the vector
    has unit-modulus entries and norm ``sqrt(num_antennas)``.
    """
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    m = np.arange(num_antennas)
    return np.exp(-1j * np.pi * m * np.cos(theta))


def asymptotic_correlation(h_a: np.ndarray, h_b: np.ndarray) -> float:
    """Normalized correlation ``|h_a^H h_b| / (||h_a|| ||h_b||)`` in [0, 1].

    For ULA responses at distinct effective angles this vanishes as the
    array grows, which is what makes per-path beamforming viable.
    """
    na = np.linalg.norm(h_a)
    nb = np.linalg.norm(h_b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("correlation undefined for a zero vector")
    return float(np.abs(np.vdot(h_a, h_b)) / (na * nb))


def ula_correlation(theta_a: float, theta_b: float, num_antennas: int) -> float:
    """Closed-form ULA correlation via the Dirichlet kernel.

    Equals ``asymptotic_correlation(a(theta_a), a(theta_b))`` exactly:
    ``|sin(M pi d / 2)| / (M |sin(pi d / 2)|)`` with
    ``d = cos(theta_a) - cos(theta_b)``.
    """
    d = np.cos(theta_a) - np.cos(theta_b)
    s = np.sin(np.pi * d / 2.0)
    if abs(s) < 1e-300:
        return 1.0
    return float(abs(np.sin(num_antennas * np.pi * d / 2.0)) / (num_antennas * abs(s)))


def generate_scenario(config: ScenarioConfig, rng: np.random.Generator | None = None) -> ScenarioChannel:
    """Draw one random channel realization.

    Per user: ``L_k`` integer delays uniform without replacement from
    ``{0, ..., max_delay}`` (distinct delays keep the delay
    pre-compensation offsets distinct), AoDs i.i.d. uniform over
    ``aod_range_deg``, and gains i.i.d. circularly-symmetric complex
    Gaussian with per-path variance ``gain_scale / L_k`` so each user's
    average channel energy is ``gain_scale`` regardless of path count.

    Deterministic for a given ``config.rng_seed``; pass ``rng`` to drive
    generation from an external stream (e.g. one sub-stream per
    Monte-Carlo trial) instead.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)

    lo, hi = np.deg2rad(config.aod_range_deg)
    ues = []
    columns = []
    for num_paths in config.paths_per_ue:
        delays = rng.choice(config.max_delay + 1, size=num_paths, replace=False)
        aods = rng.uniform(lo, hi, size=num_paths)
        std = np.sqrt(config.gain_scale / (2.0 * num_paths))
        gains = std * (rng.standard_normal(num_paths) + 1j * rng.standard_normal(num_paths))

        steering = np.empty((config.num_antennas, num_paths), dtype=complex)
        paths = []
        for l in range(num_paths):
            steering[:, l] = gains[l] * array_response(aods[l], config.num_antennas)
            paths.append(PathParams(gain=complex(gains[l]), aod=float(aods[l]), delay=int(delays[l])))
        ues.append(UeChannel(paths=tuple(paths), steering=steering))
        columns.append(steering)

    matrix = np.concatenate(columns, axis=1)
    return ScenarioChannel(config=config, ues=tuple(ues), matrix=matrix)
