"""Area-constrained descent of F_We over star-shaped or convex curves.

Each iteration moves the shape coefficients against the shape gradient
G = -(We/2)(d_n psi)^2 + H transported to coefficient space, projected so the
first-order area change vanishes, then rescales to area pi exactly.  The
translation modes are kept at zero.  Coefficient gradients are divided by
1 + k^2 (an H^1-type metric) so that high modes do not dictate the step size.

In convex mode the shape is a support function h and every step is followed
by the nearest-point projection (same metric) onto h + h'' >= floor at the
nodes, which makes the iteration a projected gradient method.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .energy import EnergyReport, identity_report, shape_gradient
from .geometry import FourierShape, ShapeError, SupportShape, discretize, perimeter
from .potential import solve_equilibrium

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinimizeConfig:
    n_nodes: int = 128
    max_iters: int = 2000
    grad_tol: float = 1e-7
    armijo: float = 1e-4
    initial_step: float = 0.1
    max_step: float = 10.0
    min_radius: float = 0.05
    curvature_floor: float = 1e-3  # relative to the mean radius h0
    precondition: bool = True


@dataclass
class MinimizeResult:
    shape: FourierShape | SupportShape
    report: EnergyReport
    history: list[dict] = field(default_factory=list)
    converged: bool = False
    message: str = ""

    @property
    def functional(self) -> float:
        return self.report.functional

    @property
    def perimeter(self) -> float:
        return self.report.perimeter


HISTORY_COLUMNS = ("iter", "functional", "perimeter", "log_energy", "area", "grad_norm", "step")


def _params(shape) -> np.ndarray:
    c0 = shape.a0 if isinstance(shape, FourierShape) else shape.h0
    return np.concatenate([[c0], shape.a[1:], shape.b[1:]])


def _from_params(template, p: np.ndarray):
    k = template.max_mode
    a = np.concatenate([[0.0], p[1:k]])
    b = np.concatenate([[0.0], p[k:]])
    if isinstance(template, FourierShape):
        return FourierShape(k, p[0], a, b)
    return SupportShape(k, p[0], a, b)


def _mode_numbers(k: int) -> np.ndarray:
    m = np.arange(2, k + 1)
    return np.concatenate([[0], m, m])


def _basis(theta: np.ndarray, k: int) -> np.ndarray:
    """Rows: 1, cos(k theta) for k >= 2, sin(k theta) for k >= 2."""
    m = np.arange(2, k + 1)
    return np.vstack([np.ones_like(theta), np.cos(np.outer(m, theta)), np.sin(np.outer(m, theta))])


def _evaluate(shape, we: float, n_nodes: int):
    disc = discretize(shape, n_nodes)
    sol = solve_equilibrium(disc)
    f = we * np.pi * sol.robin_constant + perimeter(disc)
    g = shape_gradient(disc, sol, we)
    # normal displacement per unit coefficient: r . n / |x'| * speed for r = 1 + eta,
    # and the support function change itself (times ds/dtheta) for convex shapes
    if isinstance(shape, FourierShape):
        jac = shape.radius(disc.theta)
    else:
        jac = disc.speed
    basis = _basis(disc.theta, shape.max_mode)
    h = 2 * np.pi / n_nodes
    grad = basis @ (g * jac) * h
    area_grad = basis @ jac * h
    return f, grad, area_grad, disc, sol


def _normalize(shape):
    shape = shape.scaled_to_area(np.pi)
    return shape


def _curvature_rows(theta: np.ndarray, k: int) -> np.ndarray:
    """Matrix mapping (h0, a_2.., b_2..) to h + h'' at the nodes."""
    m = np.arange(2, k + 1)
    return np.hstack([np.ones((theta.size, 1)), (1 - m**2) * np.cos(np.outer(theta, m)), (1 - m**2) * np.sin(np.outer(theta, m))])


def project_convex(
    shape: SupportShape,
    n_nodes: int,
    floor: float = 1e-3,
    weights: np.ndarray | None = None,
    area_normal: np.ndarray | None = None,
) -> SupportShape:
    """Nearest support function (weighted coefficient norm) with h + h'' >= floor * h0.

    h + h'' is linear in the coefficients, so this is a small quadratic
    program over a polyhedral cone; the translation harmonic is dropped.  The
    bound is checked on 4 * n_nodes angles.  It is relative to the mean radius
    h0 so that rescaling to the target area keeps a projected shape feasible.  ``area_normal`` (the area gradient
    in coefficient space) adds the linearized area constraint.
    """
    k = shape.max_mode
    # the bound is imposed on a grid finer than the nodes: high modes of h + h''
    # can dip below zero between nodes and produce a non-simple curve
    m = 4 * n_nodes
    rows = _curvature_rows(2 * np.pi * np.arange(m) / m, k)
    rows[:, 0] -= floor
    q = _params(shape)
    if (rows @ q).min() >= -1e-12 and shape.a[0] == 0 and shape.b[0] == 0:
        return shape
    # whitened variables y = sqrt(w) (p - q) make the objective |y|^2 / 2
    sw = np.sqrt(np.ones(q.size) if weights is None else np.asarray(weights, dtype=float))
    a = rows / sw
    b = rows @ q
    cons = [{"type": "ineq", "fun": lambda y: a @ y + b, "jac": lambda y: a}]
    if area_normal is not None:
        nrm = np.asarray(area_normal, dtype=float) / sw
        cons.append({"type": "eq", "fun": lambda y: np.atleast_1d(nrm @ y), "jac": lambda y: nrm[None, :]})
    res = optimize.minimize(
        lambda y: 0.5 * y @ y,
        np.zeros(q.size),
        jac=lambda y: y,
        constraints=cons,
        method="SLSQP",
        options={"ftol": 1e-15, "maxiter": 500},
    )
    p = q + res.x / sw
    short = -(rows @ p).min()
    if short > 0:
        # SLSQP stops within its own tolerance; lifting h0 restores the bound
        p[0] += short / (1 - floor)
    return _from_params(shape, p)


def minimize_energy(
    we: float,
    initial: FourierShape | SupportShape,
    constraint: str = "none",
    config: MinimizeConfig = MinimizeConfig(),
) -> MinimizeResult:
    """Projected gradient descent with Armijo backtracking on F_We at area pi."""
    if we < 0:
        raise ValueError("We must be nonnegative")
    if constraint not in ("none", "convex"):
        raise ValueError("constraint must be 'none' or 'convex'")
    if constraint == "convex" and not isinstance(initial, SupportShape):
        raise TypeError("convex minimization needs a SupportShape")
    if constraint == "none" and not isinstance(initial, FourierShape):
        raise TypeError("unconstrained minimization needs a FourierShape")
    n = config.n_nodes
    convex = constraint == "convex"

    shape = initial.with_coefficients(a=np.concatenate([[0.0], initial.a[1:]]), b=np.concatenate([[0.0], initial.b[1:]]))
    kk = _mode_numbers(shape.max_mode)
    metric = 1.0 / (1.0 + kk**2) if config.precondition else np.ones(kk.size)
    if convex:
        shape = project_convex(shape, n, config.curvature_floor, 1.0 / metric)
    shape = _normalize(shape)
    f, grad, agrad, disc, sol = _evaluate(shape, we, n)

    history = []
    step = config.initial_step
    converged, message = False, "maximum iterations reached"
    for it in range(config.max_iters):
        mu = (agrad @ (metric * grad)) / (agrad @ (metric * agrad))
        pgrad = grad - mu * agrad
        direction = -metric * pgrad
        p = _params(shape)
        gnorm = float(np.sqrt(pgrad @ (metric * pgrad)))
        if convex:
            # length of the unit projected step: zero exactly at constrained stationary points
            moved = _params(project_convex(_from_params(shape, p + direction), n, config.curvature_floor, 1.0 / metric, agrad)) - p
            gnorm = float(np.sqrt(moved @ (moved / metric)))
        history.append(
            dict(iter=it, functional=f, perimeter=perimeter(disc), log_energy=sol.robin_constant,
                 area=float(shape.area()), grad_norm=gnorm, step=step)
        )
        if gnorm < config.grad_tol:
            converged, message = True, "projected gradient below tolerance"
            break
        step = min(2 * step, config.max_step)
        accepted = False
        while step > 1e-12:
            try:
                trial = _from_params(shape, p + step * direction)
                if convex:
                    trial = project_convex(trial, n, config.curvature_floor, 1.0 / metric, agrad)
                elif trial.min_radius(n) < config.min_radius:
                    raise ShapeError("radius floor")
                trial = _normalize(trial)
                f_t, grad_t, agrad_t, disc_t, sol_t = _evaluate(trial, we, n)
            except (ShapeError, np.linalg.LinAlgError, RuntimeError):
                step *= 0.5
                continue
            # sufficient decrease measured along the step actually taken (projection
            # and area rescaling both move the point off the straight ray)
            predicted = float(pgrad @ (_params(trial) - p))
            if predicted < 0 and f_t <= f + config.armijo * predicted:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # at round-off level the Armijo test cannot distinguish further descent
            if gnorm < 1e2 * config.grad_tol:
                converged, message = True, "stalled at round-off level"
            else:
                message = f"line search failed at iteration {it} (projected gradient {gnorm:.3e})"
                log.warning(message)
            break
        shape, f, grad, agrad, disc, sol = trial, f_t, grad_t, agrad_t, disc_t, sol_t

    report = identity_report(disc, sol, we)
    return MinimizeResult(shape, report, history, converged, message)
