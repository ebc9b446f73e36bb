"""Linearization of the jump equation around the unit disk.

For a radial perturbation r = 1 + eta, the linearized jump operator acts on
the Fourier mode k by the eigenvalue (|k| - 1)(|k| + 1 - We).  The exterior
Dirichlet-to-Neumann map of the unit circle has symbol |k|.  Modes k = +-1 are
translations; for integer We = m >= 3 the mode |k| = m - 1 is neutral and a
non-circular branch bifurcates.

The second variation of F_We under area-preserving perturbations is checked
numerically by central differences of the full functional.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import functional
from .geometry import FourierShape, discretize, ellipse_log_energy, ellipse_perimeter
from .potential import solve_equilibrium

# F(eps cos k) + F(-eps cos k) - 2 F(disk) = CALIBRATION * eigenvalue * eps^2 + O(eps^4).
# With the unitary two-sided Fourier convention, |eta_hat(+-k)|^2 sum to pi eps^2,
# so the constant is pi; ``calibrate`` recomputes it from the k=2, We=0 run.
CALIBRATION = np.pi


class ToleranceError(ArithmeticError):
    """Raised when a finite-difference probe is contaminated by higher-order terms."""


@dataclass(frozen=True)
class ModeEigen:
    k: int
    we: float
    eigenvalue: float

    @property
    def is_translation(self) -> bool:
        return abs(self.k) == 1

    @property
    def is_bifurcation(self) -> bool:
        return abs(self.k) >= 2 and self.eigenvalue == 0.0

    @property
    def tag(self) -> str:
        if self.is_translation:
            return "translation"
        if abs(self.k) == 0:
            return "area"
        if self.is_bifurcation:
            return "bifurcation"
        return "stable" if self.eigenvalue > 0 else "unstable"


def dtn_symbol(k: int) -> float:
    return float(abs(k))


def dispersion(k: int, we: float) -> ModeEigen:
    k = int(k)
    return ModeEigen(k, float(we), (abs(k) - 1) * ((abs(k) + 1) - float(we)) + 0.0)


@dataclass(frozen=True)
class BifurcationPoint:
    we: int
    kernel_modes: tuple[int, int]


def bifurcation_points(we_min: float, we_max: float) -> list[BifurcationPoint]:
    """Integer Weber numbers m >= 3 in [we_min, we_max] with kernel modes +-(m - 1)."""
    if we_min > we_max:
        raise ValueError("we_min must not exceed we_max")
    lo = max(3, int(np.ceil(we_min)))
    return [BifurcationPoint(m, (m - 1, -(m - 1))) for m in range(lo, int(np.floor(we_max)) + 1)]


def area_preserving_mode(k: int, eps: float, max_mode: int | None = None) -> FourierShape:
    return FourierShape.mode(k, eps, max_mode).with_area_zero_mode(np.pi)


def _raw_second_difference(we: float, k: int, eps: float, n_nodes: int) -> float:
    f0 = functional(discretize(FourierShape.disk(abs(k)), n_nodes), we)
    fp = functional(discretize(area_preserving_mode(abs(k), eps), n_nodes), we)
    fm = functional(discretize(area_preserving_mode(abs(k), -eps), n_nodes), we)
    return (fp + fm - 2 * f0) / eps**2


def calibrate(eps: float = 1e-3, n_nodes: int = 64) -> float:
    """Normalization of the raw second difference, from k = 2 at We = 0 (eigenvalue 3)."""
    return _raw_second_difference(0.0, 2, eps, n_nodes) / 3.0


def second_variation_fd(
    we: float,
    k: int,
    eps: float = 1e-3,
    n_nodes: int | None = None,
    check_tol: float = 1e-2,
    richardson: bool = True,
) -> float:
    """Numerical quadratic coefficient of F_We along the area-preserving mode k.

    Uses steps eps and eps/2; the Richardson combination removes the O(eps^2)
    error.  A relative disagreement between the two raw values above
    ``check_tol`` (scaled by max(1, |eigenvalue|)) signals higher-order
    contamination.
    """
    k = abs(int(k))
    if k < 2:
        raise ValueError("|k| must be at least 2 (k = 0, +-1 are area and translation modes)")
    if n_nodes is None:
        n_nodes = max(64, 16 * k)
    if n_nodes < 16 * k:
        raise ValueError("n_nodes must be at least 16 |k|")
    v1 = _raw_second_difference(we, k, eps, n_nodes) / CALIBRATION
    v2 = _raw_second_difference(we, k, eps / 2, n_nodes) / CALIBRATION
    scale = max(1.0, abs(v2))
    if abs(v1 - v2) > check_tol * scale:
        raise ToleranceError(f"step {eps} too large: {v1} vs {v2} at half step")
    return (4 * v2 - v1) / 3 if richardson else v2


@dataclass(frozen=True)
class SpectrumRow:
    k: int
    we: float
    eigenvalue_formula: float
    eigenvalue_fd: float
    abs_err: float
    tag: str


def spectrum_table(k_values, we_values, eps: float = 1e-3, n_nodes: int | None = None) -> list[SpectrumRow]:
    rows = []
    for we in we_values:
        for k in k_values:
            m = dispersion(k, we)
            if abs(k) >= 2:
                fd = second_variation_fd(we, k, eps, n_nodes)
            else:
                # k = 0, +-1 carry no area-preserving shape change
                fd = m.eigenvalue
            rows.append(SpectrumRow(int(k), float(we), m.eigenvalue, fd, abs(fd - m.eigenvalue), m.tag))
    return rows


def neumann_response(k: int, eps: float, n_nodes: int = 256) -> float:
    """cos(k theta) coefficient of d_n psi - 1 on r = 1 + eps cos(k theta), divided by eps.

    With the normal pointing out of the bubble (d_n psi = +1 on the unit
    circle) the linearization predicts Lambda - 1 = |k| - 1; measured with the
    normal of the exterior domain the same response reads (1 - Lambda).
    """
    disc = discretize(FourierShape.mode(abs(k), eps), n_nodes)
    sol = solve_equilibrium(disc)
    # compare at fixed angle: nodes sit on theta; value at the moved boundary
    coeff = 2 * np.mean((sol.neumann_trace - 1) * np.cos(abs(k) * disc.theta))
    return coeff / eps


# ---------------------------------------------------------------------------
# ellipse expansion F_We(E_t) = 2pi + pi(3 - We) t^2 / 2 + pi(8 We + 3) t^4 / 96 + O(t^6)


def ellipse_energy(t: float, we: float) -> float:
    return ellipse_perimeter(t) + we * np.pi * ellipse_log_energy(t)


@dataclass(frozen=True)
class EllipseFit:
    we: float
    c2: float
    c4: float
    c6: float
    c2_expected: float
    c4_expected: float
    max_remainder: float

    @property
    def c2_rel_err(self) -> float:
        return abs(self.c2 - self.c2_expected) / abs(self.c2_expected) if self.c2_expected else abs(self.c2)

    @property
    def c4_rel_err(self) -> float:
        return abs(self.c4 - self.c4_expected) / abs(self.c4_expected)


def ellipse_quartic_check(we: float, t_values) -> EllipseFit:
    """Least-squares fit of F_We(E_t) - 2pi by c2 t^2 + c4 t^4 + c6 t^6.

    ``max_remainder`` is the largest |F - expansion through t^4| over the
    samples, which should scale like t^6.
    """
    t = np.asarray(list(t_values), dtype=float)
    if np.any(t <= 0) or np.any(t > 0.3):
        raise ValueError("t values must lie in (0, 0.3]")
    f = np.array([ellipse_energy(ti, we) for ti in t]) - 2 * np.pi
    basis = np.column_stack([t**2, t**4, t**6])
    coef, *_ = np.linalg.lstsq(basis, f, rcond=None)
    c2e = 0.5 * np.pi * (3 - we)
    c4e = np.pi * (8 * we + 3) / 96
    remainder = np.abs(f - c2e * t**2 - c4e * t**4)
    return EllipseFit(float(we), *map(float, coef), c2e, c4e, float(remainder.max()))
