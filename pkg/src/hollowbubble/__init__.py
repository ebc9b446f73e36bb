"""Two-dimensional hollow vortices with surface tension: perimeter plus
logarithmic-energy shapes, their identities, linear spectrum, minimizers and
bifurcating branches."""

from .energy import EnergyReport, functional, identity_report, lambda_fit, shape_gradient, weber_number
from .geometry import (
    BoundaryDiscretization,
    FourierShape,
    ShapeError,
    SupportShape,
    area,
    discretize,
    ellipse_family,
    ellipse_log_energy,
    ellipse_perimeter,
    perimeter,
)
from .minimize import MinimizeConfig, minimize_energy
from .potential import EquilibriumSolution, log_energy, solve_equilibrium
from .solve import BranchPoint, SolverConfig, continue_branch, newton_solve, switch_branch
from .spectrum import bifurcation_points, dispersion, second_variation_fd

__version__ = "0.1.0"
