"""Energy F_We(E) = We * pi * I(E) + P(E), its shape gradient and identity checks."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .geometry import BoundaryDiscretization, area, discretize, perimeter, position_dot_normal
from .potential import EquilibriumSolution, solve_equilibrium


def weber_number(rho: float, alpha: float, sigma: float, R: float) -> float:
    """Dimensionless ratio rho alpha^2 / (sigma R) of circulation to capillarity."""
    if sigma <= 0 or R <= 0:
        raise ValueError("sigma and R must be positive")
    return rho * alpha**2 / (sigma * R)


def _check_we(we: float) -> float:
    we = float(we)
    if not we >= 0:
        raise ValueError(f"Weber number must be nonnegative, got {we}")
    return we


def functional(disc: BoundaryDiscretization, we: float, sol: EquilibriumSolution | None = None) -> float:
    we = _check_we(we)
    if sol is None:
        sol = solve_equilibrium(disc)
    return we * np.pi * sol.robin_constant + perimeter(disc)


def jump_residual(disc: BoundaryDiscretization, sol: EquilibriumSolution, we: float, lam: float) -> np.ndarray:
    """-(We/2) (d_n psi)^2 + H - lambda at every node."""
    return -0.5 * we * sol.neumann_trace**2 + disc.curvature - lam


def lambda_fit(disc: BoundaryDiscretization, sol: EquilibriumSolution, we: float) -> float:
    """lambda from the integrated jump condition (Gauss-Bonnet): the arclength mean of
    -(We/2)(d_n psi)^2 + H, which is also its L2(ds)-best constant."""
    return (2 * np.pi - 0.5 * we * disc.integrate(sol.neumann_trace**2)) / perimeter(disc)


def shape_gradient(disc: BoundaryDiscretization, sol: EquilibriumSolution, we: float) -> np.ndarray:
    """L2(ds) gradient density of F_We for outward normal velocity.

    Perimeter contributes H; the Robin constant moves by
    -(1/2pi) int (d_n psi)^2 V_n ds (Hadamard), hence the -(We/2)(d_n psi)^2 term.
    """
    return -0.5 * we * sol.neumann_trace**2 + disc.curvature


def gradient_fd_check(shape, direction, we: float, eps: float, n_nodes: int = 128) -> tuple[float, float]:
    """(int G V_n ds, central difference of F_We) along eta -> eta + eps * direction.

    Both shapes are FourierShape; V_n is the normal velocity of the radial
    displacement direction.eta(theta) * e_r.
    """
    disc = discretize(shape, n_nodes)
    sol = solve_equilibrium(disc)
    deta = direction.eta(disc.theta)[0]
    radial_dot_n = np.cos(disc.theta) * disc.normal[:, 0] + np.sin(disc.theta) * disc.normal[:, 1]
    analytic = disc.integrate(shape_gradient(disc, sol, we) * deta * radial_dot_n)

    def shifted(sign):
        return shape.with_coefficients(
            a0=shape.a0 + sign * eps * direction.a0, a=shape.a + sign * eps * direction.a, b=shape.b + sign * eps * direction.b
        )

    fd = (functional(discretize(shifted(1), n_nodes), we) - functional(discretize(shifted(-1), n_nodes), we)) / (2 * eps)
    return float(analytic), float(fd)


def perimeter_lower_envelope(s: float, we: float) -> float:
    """s - We pi log(s / 2pi): lower bound of F_We at perimeter s."""
    if s < 2 * np.pi * (1 - 1e-14):
        raise ValueError("perimeter below the isoperimetric floor 2 pi")
    return s - we * np.pi * np.log(s / (2 * np.pi))


@dataclass
class IdentityResiduals:
    flux: float
    pohozaev: float
    minkowski_1: float
    minkowski_2: float
    jump_gb: float
    flux_l2: float | None
    cauchy_schwarz_slack: float

    def universal_max(self) -> float:
        """Largest of the residuals that vanish for every shape."""
        return max(abs(self.flux), abs(self.pohozaev), abs(self.minkowski_1), abs(self.minkowski_2))


@dataclass
class EnergyReport:
    we: float
    perimeter: float
    area: float
    log_energy: float
    functional: float
    lambda_best: float
    jump_residual_norm: float
    identity_residuals: IdentityResiduals

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def identity_report(
    disc: BoundaryDiscretization,
    sol: EquilibriumSolution | None = None,
    we: float = 0.0,
    origin: tuple[float, float] | None = None,
) -> EnergyReport:
    """All integral identities of the problem evaluated on one discretized shape.

    flux, pohozaev and both Minkowski residuals vanish for every curve;
    flux_l2 vanishes only on solutions of the jump equation.  ``origin``
    defaults to the centroid of the nodes.
    """
    we = _check_we(we)
    if sol is None:
        sol = solve_equilibrium(disc)
    if origin is None:
        origin = (float(np.mean(disc.x)), float(np.mean(disc.y)))
    p = perimeter(disc)
    a = area(disc)
    g = sol.neumann_trace
    g2 = disc.integrate(g**2)
    xn = position_dot_normal(disc, origin)
    lam = lambda_fit(disc, sol, we)
    res = jump_residual(disc, sol, we, lam)
    ids = IdentityResiduals(
        flux=disc.integrate(g) - 2 * np.pi,
        pohozaev=disc.integrate(xn * g**2) - 2 * np.pi,
        minkowski_1=disc.integrate(xn) - 2 * a,
        minkowski_2=disc.integrate(disc.curvature * xn) - p,
        jump_gb=-0.5 * we * g2 + 2 * np.pi - lam * p,
        flux_l2=(g2 - (p - p**2 / (np.pi * we) + 4 * np.pi / we)) if we > 0 else None,
        cauchy_schwarz_slack=g2 - 4 * np.pi**2 / p,
    )
    return EnergyReport(
        we=we,
        perimeter=p,
        area=a,
        log_energy=sol.robin_constant,
        functional=we * np.pi * sol.robin_constant + p,
        lambda_best=lam,
        jump_residual_norm=float(np.sqrt(disc.integrate(res**2))),
        identity_residuals=ids,
    )


SCAN_COLUMNS = (
    "we", "perimeter", "log_energy", "functional", "lambda_best", "jump_residual_norm",
    "flux", "pohozaev", "minkowski_1", "minkowski_2", "jump_gb", "flux_l2", "cauchy_schwarz_slack",
)


def report_row(rep: EnergyReport) -> list:
    ids = rep.identity_residuals
    return [
        rep.we, rep.perimeter, rep.log_energy, rep.functional, rep.lambda_best, rep.jump_residual_norm,
        ids.flux, ids.pohozaev, ids.minkowski_1, ids.minkowski_2, ids.jump_gb,
        "" if ids.flux_l2 is None else ids.flux_l2, ids.cauchy_schwarz_slack,
    ]
