"""Equilibrium measure and exterior stream function of a closed curve.

The equilibrium density rho (per unit arclength) and the Robin constant V solve

    int_S log|x - y| rho(y) ds(y) = -V   for x on S,     int_S rho ds = 1.

The potential of rho is then constant (= -V) on and inside the curve, so
``psi = log-potential + V + C0`` is the exterior solution with ``psi = C0`` on
the curve and ``psi = log|x| + V + C0 + o(1)`` at infinity.  The energy of the
measure is I(E) = V, and the capacity is exp(-V).

Since psi is constant inside, the jump of the normal derivative of a single
layer potential gives the exterior Neumann trace directly:
``d_n psi = 2 pi rho``.

The first-kind equation is discretized with the periodic logarithmic
splitting log|x(s) - x(t)| = (1/2) log(4 sin^2((s-t)/2)) + smooth, the
singular part integrated exactly against the trigonometric interpolant of the
density and the smooth part by the trapezoidal rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .geometry import BoundaryDiscretization


class EquilibriumSolverError(RuntimeError):
    def __init__(self, message: str, condition_number: float = float("nan")):
        super().__init__(f"{message} (condition number {condition_number:.3e})")
        self.condition_number = condition_number


class PointLocationError(ValueError):
    """Raised when a stream-function evaluation point is not strictly exterior."""


@dataclass(frozen=True)
class EquilibriumSolution:
    density: np.ndarray
    robin_constant: float
    neumann_trace: np.ndarray
    param_density: np.ndarray  # density per unit parameter, rho * speed
    c0: float = 0.0
    condition_number: float = float("nan")

    @property
    def capacity(self) -> float:
        return float(np.exp(-self.robin_constant))


def log_sin_weights(n_nodes: int) -> np.ndarray:
    """Quadrature weights R_j for int_0^{2pi} log(4 sin^2((t - s)/2)) f(s) ds.

    Returns the vector indexed by the node offset ``j = i - l``; the rule is
    exact for trigonometric polynomials of degree < N/2 (and for cos(N s / 2)).
    """
    if n_nodes % 2:
        raise ValueError("n_nodes must be even")
    n = n_nodes // 2
    j = np.arange(n_nodes)
    m = np.arange(1, n)
    r = -(2 * np.pi / n) * (np.cos(np.outer(j, m) * np.pi / n) @ (1.0 / m))
    return r - (np.pi / n**2) * np.cos(np.pi * j)


def _system_matrix(disc: BoundaryDiscretization) -> np.ndarray:
    n = disc.n_nodes
    h = 2 * np.pi / n
    z = disc.z
    idx = np.arange(n)
    offset = (idx[:, None] - idx[None, :]) % n
    diff = np.abs(z[:, None] - z[None, :])
    dtheta = disc.theta[:, None] - disc.theta[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        smooth = np.log(diff) - 0.5 * np.log(4 * np.sin(0.5 * dtheta) ** 2)
    smooth[idx, idx] = np.log(disc.speed)
    if not np.all(np.isfinite(smooth)):
        raise EquilibriumSolverError("curve self-intersects or has coincident nodes")
    a = 0.5 * log_sin_weights(n)[offset] + h * smooth
    big = np.empty((n + 1, n + 1))
    big[:n, :n] = a
    big[:n, n] = 1.0
    big[n, :n] = h
    big[n, n] = 0.0
    return big


def solve_equilibrium(
    disc: BoundaryDiscretization, c0: float = 0.0, with_condition: bool = False
) -> EquilibriumSolution:
    """Equilibrium measure, Robin constant and Neumann trace of the curve."""
    n = disc.n_nodes
    if n % 2:
        raise ValueError("n_nodes must be even")
    mat = _system_matrix(disc)
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    cond = float(np.linalg.cond(mat)) if with_condition else float("nan")
    try:
        sol = scipy.linalg.solve(mat, rhs, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EquilibriumSolverError(f"singular equilibrium system: {exc}", float(np.linalg.cond(mat))) from exc
    if not np.all(np.isfinite(sol)):
        raise EquilibriumSolverError("non-finite equilibrium solution", float(np.linalg.cond(mat)))
    phi = sol[:n]
    rho = phi / disc.speed
    return EquilibriumSolution(
        density=rho,
        robin_constant=float(sol[n]),
        neumann_trace=2 * np.pi * rho,
        param_density=phi,
        c0=float(c0),
        condition_number=cond,
    )


def log_energy(disc: BoundaryDiscretization) -> float:
    """Logarithmic potential energy I(E) = -log Cap(E)."""
    return solve_equilibrium(disc).robin_constant


def winding_number(disc: BoundaryDiscretization, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = pts[:, 0] + 1j * pts[:, 1]
    z = disc.z
    d = z[None, :] - w[:, None]
    ang = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)


def eval_stream(disc: BoundaryDiscretization, sol: EquilibriumSolution, points, min_distance: float = 1e-8) -> np.ndarray:
    """psi at exterior points from the discrete single layer."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = pts[:, 0] + 1j * pts[:, 1]
    dist = np.abs(disc.z[None, :] - w[:, None])
    if np.any(dist.min(axis=1) < min_distance) or np.any(winding_number(disc, pts) != 0):
        raise PointLocationError("stream function is only defined strictly outside the curve")
    h = 2 * np.pi / disc.n_nodes
    return np.log(dist) @ (h * sol.param_density) + sol.robin_constant + sol.c0


def solution_csv(disc: BoundaryDiscretization, sol: EquilibriumSolution) -> str:
    lines = ["theta,density,neumann_trace"]
    lines += [f"{t:.17g},{r:.17g},{g:.17g}" for t, r, g in zip(disc.theta, sol.density, sol.neumann_trace)]
    return "\n".join(lines) + "\n"


def diagnostics(disc: BoundaryDiscretization, sol: EquilibriumSolution | None = None) -> dict:
    if sol is None or not np.isfinite(sol.condition_number):
        sol = solve_equilibrium(disc, with_condition=True)
    return {
        "robin_constant": sol.robin_constant,
        "capacity": sol.capacity,
        "flux": disc.integrate(sol.neumann_trace),
        "condition_number": sol.condition_number,
    }


def diagnostics_json(disc: BoundaryDiscretization, sol: EquilibriumSolution | None = None) -> str:
    return json.dumps(diagnostics(disc, sol), indent=2)
