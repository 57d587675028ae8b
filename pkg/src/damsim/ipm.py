"""Primal-dual interior-point solver for the amplitude subproblem.

Each outer iteration of the successive convex approximation fixes a
local point and solves one smooth convex program: maximize the sum of
``log2(1 + slack_k)`` subject to, per UE, a convex quadratic
interference power bounded by an affine function of the amplitudes and
the slack, plus a total-power ball and nonnegativity. This module owns
that inner solve.

The problem is tiny (total paths + UEs variables) but badly scaled in
physical units: noise powers around 1e-13 sit next to SINRs around
1e13. The solver therefore works on a diagonally rescaled copy where
amplitudes are measured in units of the power budget, slacks relative
to the local point, and each interference constraint relative to its
own right-hand side at the local point. On that copy everything is
O(1) and a plain Newton primal-dual iteration with fraction-to-boundary
steps converges to tight tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "InfeasibleLocalPointError",
    "SubproblemConvergenceError",
    "ScaledSubproblem",
    "IpmSolution",
    "solve_ipm",
]


class InfeasibleLocalPointError(ValueError):
    """The expansion point cannot be made strictly feasible."""


class SubproblemConvergenceError(RuntimeError):
    """The interior-point iteration failed to reach its tolerances."""


@dataclass(frozen=True)
class ScaledSubproblem:
    """One rescaled convex subproblem instance.

    Variables are ``x = [a_tilde (n_paths), t (num_ues)]``. The UE ``k``
    interference constraint is

        ``sum_k' || quad[k][k'].T @ a_tilde_k' ||^2 + lin[k] @ x + const[k] <= 0``

    followed by the unit power ball ``||a_tilde||^2 - 1 <= 0`` and the
    bounds ``-x <= 0``. The objective to minimize is
    ``-sum_k ln(1 + gamma_ref[k] * t[k])``.
    """

    path_counts: tuple[int, ...]
    gamma_ref: np.ndarray  # (K,) slack units, strictly positive
    quad: tuple  # quad[k][k'] real matrix (L_k', 2*bins) or None
    lin: np.ndarray  # (K, n)
    const: np.ndarray  # (K,)

    @property
    def num_ues(self) -> int:
        return len(self.path_counts)

    @property
    def num_paths(self) -> int:
        return int(sum(self.path_counts))

    @property
    def num_vars(self) -> int:
        return self.num_paths + self.num_ues

    @property
    def num_constraints(self) -> int:
        return self.num_ues + 1 + self.num_vars

    def path_slice(self, k: int) -> slice:
        start = int(sum(self.path_counts[:k]))
        return slice(start, start + self.path_counts[k])

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return x[: self.num_paths], x[self.num_paths :]

    def objective(self, x: np.ndarray) -> float:
        _, t = self.split(x)
        return float(-np.sum(np.log1p(self.gamma_ref * t)))

    def grad_objective(self, x: np.ndarray) -> np.ndarray:
        _, t = self.split(x)
        g = np.zeros(self.num_vars)
        g[self.num_paths :] = -self.gamma_ref / (1.0 + self.gamma_ref * t)
        return g

    def hess_objective(self, x: np.ndarray) -> np.ndarray:
        _, t = self.split(x)
        h = np.zeros(self.num_vars)
        h[self.num_paths :] = (self.gamma_ref / (1.0 + self.gamma_ref * t)) ** 2
        return np.diag(h)

    def constraints(self, x: np.ndarray) -> np.ndarray:
        a, _ = self.split(x)
        g = np.empty(self.num_constraints)
        for k in range(self.num_ues):
            val = float(self.lin[k] @ x) + self.const[k]
            for k2 in range(self.num_ues):
                mat = self.quad[k][k2]
                if mat is not None:
                    val += float(np.sum((mat.T @ a[self.path_slice(k2)]) ** 2))
            g[k] = val
        g[self.num_ues] = float(a @ a) - 1.0
        g[self.num_ues + 1 :] = -x
        return g

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        a, _ = self.split(x)
        jac = np.zeros((self.num_constraints, self.num_vars))
        for k in range(self.num_ues):
            row = self.lin[k].copy()
            for k2 in range(self.num_ues):
                mat = self.quad[k][k2]
                if mat is not None:
                    sl = self.path_slice(k2)
                    row[sl] += 2.0 * (mat @ (mat.T @ a[sl]))
            jac[k] = row
        jac[self.num_ues, : self.num_paths] = 2.0 * a
        jac[self.num_ues + 1 :] = -np.eye(self.num_vars)
        return jac

    def constraint_hessian(self, lam: np.ndarray) -> np.ndarray:
        """``sum_j lam_j hess(g_j)``; only quadratic rows contribute."""
        h = np.zeros((self.num_vars, self.num_vars))
        for k in range(self.num_ues):
            if lam[k] == 0.0:
                continue
            for k2 in range(self.num_ues):
                mat = self.quad[k][k2]
                if mat is not None:
                    sl = self.path_slice(k2)
                    h[sl, sl] += 2.0 * lam[k] * (mat @ mat.T)
        h[: self.num_paths, : self.num_paths] += 2.0 * lam[self.num_ues] * np.eye(self.num_paths)
        return h

    def kkt_residual(self, x: np.ndarray, lam: np.ndarray) -> float:
        """Worst violation of stationarity, complementarity, feasibility."""
        g = self.constraints(x)
        jac = self.jacobian(x)
        r_dual = self.grad_objective(x) + jac.T @ lam
        r_comp = lam * (-g)
        return float(
            max(
                np.max(np.abs(r_dual)),
                np.max(np.abs(r_comp)),
                max(0.0, float(np.max(g))),
                max(0.0, float(np.max(-lam))),
            )
        )


@dataclass(frozen=True)
class IpmSolution:
    """Interior-point output on the scaled problem."""

    x: np.ndarray
    duals: np.ndarray
    iterations: int
    kkt_residual: float


def _residual_norm(
    problem: ScaledSubproblem, x: np.ndarray, lam: np.ndarray, inv_t: float
) -> tuple[float, np.ndarray]:
    """Norm of the perturbed KKT residual; also returns the slacks."""
    s = -problem.constraints(x)
    r_dual = problem.grad_objective(x) + problem.jacobian(x).T @ lam
    r_cent = lam * s - inv_t
    return float(np.sqrt(np.sum(r_dual**2) + np.sum(r_cent**2))), s


def solve_ipm(
    problem: ScaledSubproblem,
    x0: np.ndarray,
    tol: float = 1e-9,
    max_iters: int = 200,
) -> IpmSolution:
    """Run the primal-dual iteration from a strictly feasible ``x0``.

    Newton steps on the perturbed KKT system are taken in condensed
    form: the multiplier block is eliminated, leaving an SPD system in
    the primal variables (the bound rows contribute a strictly positive
    diagonal). The barrier weight follows the surrogate duality gap, and
    primal and dual variables share one step length chosen by
    backtracking until the full residual norm decreases; the shared step
    is what keeps the pair consistent when the quadratic rows force
    short primal moves.
    """
    x = np.asarray(x0, dtype=float).copy()
    g = problem.constraints(x)
    if np.any(g >= 0.0):
        raise InfeasibleLocalPointError("starting point is not strictly feasible")
    s = -g
    lam = np.minimum(1.0 / s, 1e6)
    m = problem.num_constraints

    gap = float(s @ lam)
    for it in range(1, max_iters + 1):
        inv_t = gap / (10.0 * m)
        jac = problem.jacobian(x)
        r_dual = problem.grad_objective(x) + jac.T @ lam
        r_cent = lam * s - inv_t

        if max(float(np.max(np.abs(r_dual))), gap) <= tol:
            return IpmSolution(
                x=x, duals=lam, iterations=it - 1, kkt_residual=problem.kkt_residual(x, lam)
            )

        h = problem.hess_objective(x) + problem.constraint_hessian(lam)
        h += jac.T @ ((lam / s)[:, None] * jac)
        h[np.diag_indices_from(h)] += 1e-14
        rhs = -r_dual + jac.T @ (r_cent / s)
        try:
            c_factor = np.linalg.cholesky(h)
            dx = np.linalg.solve(c_factor.conj().T, np.linalg.solve(c_factor, rhs))
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(h, rhs, rcond=None)[0]
        dlam = (-r_cent + lam * (jac @ dx)) / s

        # largest dual-feasible step, then backtrack a shared step length
        alpha = 1.0
        neg = dlam < 0.0
        if np.any(neg):
            alpha = min(1.0, float(np.min(0.99 * lam[neg] / -dlam[neg])))
        norm0 = float(np.sqrt(np.sum(r_dual**2) + np.sum(r_cent**2)))
        while np.any(problem.constraints(x + alpha * dx) >= 0.0):
            alpha *= 0.5
            if alpha < 1e-14:
                raise SubproblemConvergenceError("no strictly feasible step found")
        while True:
            norm_new, s_new = _residual_norm(problem, x + alpha * dx, lam + alpha * dlam, inv_t)
            if norm_new <= (1.0 - 0.01 * alpha) * norm0:
                break
            alpha *= 0.5
            if alpha < 1e-14:
                raise SubproblemConvergenceError("line search stalled")

        x = x + alpha * dx
        lam = lam + alpha * dlam
        s = s_new
        gap = float(s @ lam)

    raise SubproblemConvergenceError(
        "interior-point iteration did not converge in %d steps (gap=%.3g)" % (max_iters, gap)
    )
