"""Successive convex approximation for per-path amplitude optimization.

Regularized ZF fixes the beamforming directions but not how much power
each path carries. With unit-norm directions and nonnegative amplitudes
``a_kl``, every power in the SINR is a quadratic form in ``a``: the
desired power through a rank-two real matrix per UE, the self and cross
interference through one such matrix per delay-difference bin. The sum
rate is then a ratio of quadratics, and each outer iteration replaces
the desired-over-slack ratio with its tangent plane (a global lower
bound, since a quadratic over a positive linear form is jointly convex)
and solves the resulting convex program exactly.

The same machinery runs the strongest-path baseline: anything that can
describe its SINR through :class:`SinrData` gets the amplitude loop for
free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamforming import DirectionSet, assemble_scaled, default_rzf_epsilon, rzf_directions
from .channel import ScenarioChannel
from .core import BeamformerSet, DelayGrouping
from .ipm import InfeasibleLocalPointError, ScaledSubproblem, solve_ipm

__all__ = [
    "SinrData",
    "SubproblemResult",
    "build_rzf_sinr_data",
    "taylor_gradient",
    "solve_sca_subproblem",
    "sca_power_allocation",
    "rzf_sca",
]


@dataclass(frozen=True)
class SinrData:
    """Real-valued SINR description over per-path amplitudes.

    For receiver ``k`` with amplitude blocks ``a_k``:

    - desired power ``= || desired[k].T @ a_k ||^2`` (matrix ``(L_k, 2)``),
    - self interference ``= || self_isi[k].T @ a_k ||^2``,
    - cross interference from transmitter ``k'``
      ``= || cross[(k, k')].T @ a_k' ||^2``.

    Columns come in (real, imaginary) pairs, one pair per delay bin, so
    squared norms reproduce the complex per-bin coherent sums exactly.
    """

    desired: tuple[np.ndarray, ...]
    self_isi: tuple[np.ndarray, ...]
    cross: dict
    total_power: float
    noise_power: float

    @property
    def num_ues(self) -> int:
        return len(self.desired)

    @property
    def path_counts(self) -> tuple[int, ...]:
        return tuple(mat.shape[0] for mat in self.desired)

    def desired_power(self, k: int, a_k: np.ndarray) -> float:
        return float(np.sum((self.desired[k].T @ a_k) ** 2))

    def interference_power(self, k: int, amplitudes: tuple[np.ndarray, ...]) -> float:
        val = float(np.sum((self.self_isi[k].T @ amplitudes[k]) ** 2))
        for k2 in range(self.num_ues):
            if k2 != k:
                val += float(np.sum((self.cross[(k, k2)].T @ amplitudes[k2]) ** 2))
        return val

    def exact_sinr(self, amplitudes: tuple[np.ndarray, ...]) -> np.ndarray:
        out = np.empty(self.num_ues)
        for k in range(self.num_ues):
            out[k] = self.desired_power(k, amplitudes[k]) / (
                self.interference_power(k, amplitudes) + self.noise_power
            )
        return out


def _ri_columns(vectors: list[np.ndarray], rows: int) -> np.ndarray:
    """Stack complex column vectors as real (re, im) column pairs."""
    if not vectors:
        return np.zeros((rows, 0))
    cols = []
    for v in vectors:
        cols.append(v.real)
        cols.append(v.imag)
    return np.stack(cols, axis=1)


def build_rzf_sinr_data(
    channel: ScenarioChannel,
    grouping: DelayGrouping,
    directions: DirectionSet,
    total_power: float,
    noise_power: float,
) -> SinrData:
    """Project the delay-difference bins onto fixed unit-norm directions.

    Entry ``l'`` of the complex bin vector for pair ``(k, k')`` at
    difference ``i`` is ``h_kl^H w_k'l'`` for the unique path ``l``
    landing in that bin (zero if none does), so amplitudes multiply in
    exactly as the analytic rate computation sees them.
    """
    num_ues = channel.num_ues
    desired = []
    self_isi = []
    cross: dict = {}
    for k in range(num_ues):
        hk = channel.ues[k].steering
        for k2 in range(num_ues):
            proj = hk.conj().T @ directions.columns[k2]  # (l, l') -> h_kl^H w_k2,l'
            num_ref = channel.ues[k2].num_paths
            bins = []
            for i in grouping.bin_range(k, k2):
                vec = np.zeros(num_ref, dtype=complex)
                for (l, lp) in grouping.bins[(k, k2)].get(i, ()):
                    vec[lp] = proj[l, lp]
                if k2 == k and i == 0:
                    desired.append(_ri_columns([vec], num_ref))
                else:
                    bins.append(vec)
            if k2 == k:
                self_isi.append(_ri_columns(bins, num_ref))
            else:
                cross[(k, k2)] = _ri_columns(bins, num_ref)
    return SinrData(
        desired=tuple(desired),
        self_isi=tuple(self_isi),
        cross=cross,
        total_power=float(total_power),
        noise_power=float(noise_power),
    )


def taylor_gradient(
    desired_mat: np.ndarray, a_k: np.ndarray, gamma_k: float
) -> tuple[float, np.ndarray, float]:
    """Value and gradient of ``desired_power / gamma`` at ``(a_k, gamma_k)``.

    Returns ``(value, grad_a, grad_gamma)``. The function is jointly
    convex for ``gamma_k > 0`` and positively homogeneous of degree one,
    so its tangent plane both lower-bounds it globally and passes
    through the origin.
    """
    if gamma_k <= 0.0:
        raise InfeasibleLocalPointError("local SINR must be strictly positive")
    quad = desired_mat @ (desired_mat.T @ a_k)
    p_ds = float(a_k @ quad)
    return p_ds / gamma_k, 2.0 / gamma_k * quad, -p_ds / gamma_k**2


@dataclass(frozen=True)
class SubproblemResult:
    """One convex subproblem solution, reported in physical units.

    ``kkt_residual`` and ``duals`` refer to the rescaled problem
    actually solved (``scaled`` keeps it alongside the scaled optimum
    ``x_scaled`` so the optimality conditions can be re-checked).
    """

    amplitudes: tuple[np.ndarray, ...]
    slack_sinr: np.ndarray
    objective: float  # sum of log2(1 + slack) in bps/Hz
    iterations: int
    kkt_residual: float
    duals: np.ndarray
    scaled: ScaledSubproblem
    x_scaled: np.ndarray


def _interior_start(
    problem: ScaledSubproblem, a_scaled: np.ndarray, t_local: np.ndarray
) -> np.ndarray:
    """Strictly feasible start near the local point.

    The local point sits on the power and interference boundaries, so
    pull the amplitudes in slightly and trade some slack: lowering the
    slack variable loosens the interference rows in proportion to their
    right-hand side. If even a large trade cannot reach the interior the
    local point itself is at fault.
    """
    for shrink in (0.05, 0.2, 0.5, 0.9):
        x = np.concatenate([np.maximum(a_scaled * (1.0 - 1e-3), 1e-12), t_local * (1.0 - shrink)])
        if np.all(problem.constraints(x) < 0.0):
            return x
    raise InfeasibleLocalPointError("local point admits no strictly feasible neighborhood")


def solve_sca_subproblem(
    data: SinrData,
    local_amplitudes: tuple[np.ndarray, ...],
    local_gamma: np.ndarray,
    tol: float = 1e-9,
) -> SubproblemResult:
    """Build, rescale, and solve the convex program at one local point.

    Scaling: amplitudes in units of ``sqrt(P)``, slack ``k`` in units of
    its local value, and interference row ``k`` divided by the local
    bound value ``rho_k`` (floored by the noise power). All entries of
    the rescaled problem are then order one regardless of the physical
    operating point.
    """
    num_ues = data.num_ues
    p_total = data.total_power
    sqrt_p = np.sqrt(p_total)
    gamma_ref = np.asarray(local_gamma, dtype=float).copy()
    n_paths = sum(data.path_counts)
    n_vars = n_paths + num_ues

    offsets = np.cumsum((0,) + data.path_counts)
    lin = np.zeros((num_ues, n_vars))
    const = np.zeros(num_ues)
    quad_rows = []
    rho = np.empty(num_ues)
    for k in range(num_ues):
        a_k = local_amplitudes[k]
        bound_val, grad_a, grad_gamma = taylor_gradient(data.desired[k], a_k, gamma_ref[k])
        rho[k] = max(bound_val, data.noise_power)
        row = [None] * num_ues
        for k2 in range(num_ues):
            mat = data.self_isi[k] if k2 == k else data.cross[(k, k2)]
            if mat.size:
                row[k2] = np.sqrt(p_total / rho[k]) * mat
        quad_rows.append(tuple(row))
        lin[k, offsets[k] : offsets[k + 1]] = -sqrt_p * grad_a / rho[k]
        lin[k, n_paths + k] = -grad_gamma * gamma_ref[k] / rho[k]
        const[k] = data.noise_power / rho[k]
    problem = ScaledSubproblem(
        path_counts=data.path_counts,
        gamma_ref=gamma_ref,
        quad=tuple(quad_rows),
        lin=lin,
        const=const,
    )

    a_scaled = np.concatenate(local_amplitudes) / sqrt_p
    x0 = _interior_start(problem, a_scaled, np.ones(num_ues))
    sol = solve_ipm(problem, x0, tol=tol)

    a_flat, t = problem.split(sol.x)
    amplitudes = tuple(
        sqrt_p * a_flat[offsets[k] : offsets[k + 1]] for k in range(num_ues)
    )
    slack = gamma_ref * t
    return SubproblemResult(
        amplitudes=amplitudes,
        slack_sinr=slack,
        objective=float(np.sum(np.log2(1.0 + slack))),
        iterations=sol.iterations,
        kkt_residual=sol.kkt_residual,
        duals=sol.duals,
        scaled=problem,
        x_scaled=sol.x,
    )


def sca_power_allocation(
    data: SinrData,
    rel_tol: float = 1e-3,
    max_iters: int = 50,
) -> tuple[tuple[np.ndarray, ...], np.ndarray, np.ndarray]:
    """Run the outer approximation loop to convergence.

    Starts from a uniform full-power split with exact SINRs as the
    initial slack, so the first subproblem already has a feasible local
    point; every later local point is the previous optimum, which keeps
    the objective trace non-decreasing. Stops when the fractional
    objective increase falls below ``rel_tol``.

    Returns ``(amplitudes, slack_sinr, trace)`` where ``trace[0]`` is
    the starting objective and each further entry one subproblem value.
    """
    num_ues = data.num_ues
    amplitudes = tuple(
        np.full(n, np.sqrt(data.total_power / sum(data.path_counts)))
        for n in data.path_counts
    )
    gamma = data.exact_sinr(amplitudes)
    if np.any(gamma <= 0.0):
        raise InfeasibleLocalPointError("a UE has zero SINR at the uniform start")
    trace = [float(np.sum(np.log2(1.0 + gamma)))]

    for _ in range(max_iters):
        res = solve_sca_subproblem(data, amplitudes, gamma)
        amplitudes, gamma = res.amplitudes, res.slack_sinr
        trace.append(res.objective)
        if trace[-1] - trace[-2] < rel_tol * max(abs(trace[-2]), 1e-12):
            break
    return amplitudes, gamma, np.array(trace)


def rzf_sca(
    channel: ScenarioChannel,
    grouping: DelayGrouping,
    total_power: float,
    noise_power: float,
    epsilon: float | None = None,
    rel_tol: float = 1e-3,
    max_iters: int = 50,
) -> tuple[BeamformerSet, np.ndarray]:
    """Regularized ZF directions with optimized per-path amplitudes.

    Returns the assembled beamformer set and the objective trace of the
    amplitude optimization.
    """
    if epsilon is None:
        epsilon = default_rzf_epsilon(channel, total_power, noise_power)
    directions = rzf_directions(channel, epsilon)
    data = build_rzf_sinr_data(channel, grouping, directions, total_power, noise_power)
    amplitudes, _, trace = sca_power_allocation(data, rel_tol=rel_tol, max_iters=max_iters)
    return assemble_scaled(directions, amplitudes, scheme="DAM-RZF"), trace
