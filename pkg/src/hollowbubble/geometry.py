"""Closed planar curves sampled on a uniform parameter grid.

Two shape families are supported:

* ``FourierShape``: star-shaped curves ``r = 1 + eta(theta)`` with ``eta`` a
  real trigonometric polynomial.
* ``SupportShape``: convex curves given by their support function ``h``,
  where ``theta`` is the angle of the outward normal.  Convexity is the
  linear condition ``h'' + h >= 0``.  The gauge-function form ``E = {r < 1/f}``
  with ``f'' + f > 0`` describes the same strictly convex bodies.

All derivatives are taken analytically on the trigonometric series, so every
quantity is spectrally accurate for smooth curves.  Curves are traversed
counterclockwise and the normal points out of the enclosed region, so that the
curvature of the unit circle is +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np


class ShapeError(ValueError):
    """Raised for shape coefficients that do not describe an admissible curve."""


def _as_coeffs(values, max_mode: int) -> np.ndarray:
    arr = np.zeros(max_mode, dtype=float)
    values = np.asarray(values, dtype=float).ravel()
    if values.size > max_mode:
        raise ShapeError(f"got {values.size} coefficients for max_mode={max_mode}")
    arr[: values.size] = values
    return arr


def _trig_series(theta: np.ndarray, c0: float, a: np.ndarray, b: np.ndarray, order: int = 0):
    """Value and first ``order`` derivatives of c0 + sum a_k cos k t + b_k sin k t."""
    k = np.arange(1, a.size + 1, dtype=float)
    kt = np.outer(theta, k)
    cos, sin = np.cos(kt), np.sin(kt)
    out = [c0 + cos @ a + sin @ b]
    # d/dt of (a cos + b sin) is (k b cos - k a sin); iterate on the coefficient pair.
    ca, cb = a.copy(), b.copy()
    for _ in range(order):
        ca, cb = k * cb, -k * ca
        out.append(cos @ ca + sin @ cb)
    return out


@dataclass(frozen=True)
class FourierShape:
    """Star-shaped curve r(theta) = 1 + eta(theta).

    ``a[k-1]`` and ``b[k-1]`` multiply ``cos(k theta)`` and ``sin(k theta)``.
    """

    max_mode: int
    a0: float = 0.0
    a: np.ndarray = field(default=None)
    b: np.ndarray = field(default=None)

    def __post_init__(self):
        if int(self.max_mode) < 1:
            raise ShapeError("max_mode must be positive")
        object.__setattr__(self, "max_mode", int(self.max_mode))
        object.__setattr__(self, "a0", float(self.a0))
        a = _as_coeffs([] if self.a is None else self.a, self.max_mode)
        b = _as_coeffs([] if self.b is None else self.b, self.max_mode)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(self.a0)):
            raise ShapeError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def disk(cls, max_mode: int = 2) -> "FourierShape":
        return cls(max_mode)

    @classmethod
    def mode(cls, k: int, amplitude: float, max_mode: int | None = None, sine: bool = False):
        """Single-mode perturbation ``amplitude * cos(k theta)`` (or sin)."""
        max_mode = max(k, 2) if max_mode is None else max_mode
        c = np.zeros(max_mode)
        c[k - 1] = amplitude
        return cls(max_mode, 0.0, None if sine else c, c if sine else None)

    def eta(self, theta, order: int = 0):
        return _trig_series(np.asarray(theta, float), self.a0, self.a, self.b, order)

    def radius(self, theta) -> np.ndarray:
        return 1.0 + self.eta(theta)[0]

    def area(self) -> float:
        """Exact enclosed area, pi (1 + a0)^2 + (pi/2) sum (a_k^2 + b_k^2)."""
        return np.pi * (1 + self.a0) ** 2 + 0.5 * np.pi * float(self.a @ self.a + self.b @ self.b)

    def with_coefficients(self, a0=None, a=None, b=None) -> "FourierShape":
        return FourierShape(
            self.max_mode,
            self.a0 if a0 is None else a0,
            self.a if a is None else a,
            self.b if b is None else b,
        )

    def resized(self, max_mode: int) -> "FourierShape":
        """Same curve with more (or truncated) Fourier modes."""
        n = min(max_mode, self.max_mode)
        return FourierShape(max_mode, self.a0, self.a[:n], self.b[:n])

    def scaled_to_area(self, target: float = np.pi) -> "FourierShape":
        """Rescale about the origin, r -> s r, so that the area equals ``target``."""
        s = np.sqrt(target / self.area())
        return FourierShape(self.max_mode, s * (1 + self.a0) - 1, s * self.a, s * self.b)

    def with_area_zero_mode(self, target: float = np.pi) -> "FourierShape":
        """Adjust only the zero mode so that the area equals ``target``."""
        rest = 0.5 * float(self.a @ self.a + self.b @ self.b)
        disc = target / np.pi - rest
        if disc <= 0:
            raise ShapeError("perturbation too large to fix the area through the zero mode")
        return self.with_coefficients(a0=np.sqrt(disc) - 1)

    def min_radius(self, n_nodes: int = 512) -> float:
        theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
        return float(np.min(self.radius(theta)))


@dataclass(frozen=True)
class SupportShape:
    """Convex curve with support function h(theta) = h0 + sum a_k cos + b_k sin."""

    max_mode: int
    h0: float = 1.0
    a: np.ndarray = field(default=None)
    b: np.ndarray = field(default=None)

    def __post_init__(self):
        if int(self.max_mode) < 1:
            raise ShapeError("max_mode must be positive")
        object.__setattr__(self, "max_mode", int(self.max_mode))
        object.__setattr__(self, "h0", float(self.h0))
        a = _as_coeffs([] if self.a is None else self.a, self.max_mode)
        b = _as_coeffs([] if self.b is None else self.b, self.max_mode)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(self.h0)):
            raise ShapeError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def disk(cls, max_mode: int = 2, radius: float = 1.0) -> "SupportShape":
        return cls(max_mode, radius)

    def support(self, theta, order: int = 0):
        return _trig_series(np.asarray(theta, float), self.h0, self.a, self.b, order)

    def radius_of_curvature(self, theta) -> np.ndarray:
        h, _, h2 = self.support(theta, 2)
        return h + h2

    def perimeter(self) -> float:
        """Cauchy's formula: the perimeter is the integral of h, i.e. 2 pi h0."""
        return 2 * np.pi * self.h0

    def area(self) -> float:
        """Exact area (1/2) int (h^2 - h'^2) in terms of the coefficients."""
        k = np.arange(1, self.max_mode + 1)
        return np.pi * self.h0**2 + 0.5 * np.pi * float(np.sum((1 - k**2) * (self.a**2 + self.b**2)))

    def scaled(self, s: float) -> "SupportShape":
        return SupportShape(self.max_mode, s * self.h0, s * self.a, s * self.b)

    def scaled_to_area(self, target: float = np.pi) -> "SupportShape":
        return self.scaled(np.sqrt(target / self.area()))

    def with_coefficients(self, h0=None, a=None, b=None) -> "SupportShape":
        return SupportShape(
            self.max_mode,
            self.h0 if h0 is None else h0,
            self.a if a is None else a,
            self.b if b is None else b,
        )


Shape = Union[FourierShape, SupportShape]


@dataclass(frozen=True)
class BoundaryDiscretization:
    """Sampled closed curve with its differential geometry.

    ``speed`` is |dx/dtheta| and ``weights = speed * 2 pi / N`` are the
    trapezoidal arclength weights, exact to spectral order on smooth curves.
    ``dz`` and ``ddz`` keep the complex parameter derivatives for the
    integral-equation solver.
    """

    theta: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray
    speed: np.ndarray
    weights: np.ndarray
    dz: np.ndarray
    ddz: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.theta.size

    @property
    def z(self) -> np.ndarray:
        return self.x + 1j * self.y

    def integrate(self, values) -> float:
        """Arclength integral of nodal values."""
        return float(np.dot(self.weights, values))

    def translated(self, dx: float, dy: float) -> "BoundaryDiscretization":
        return _from_complex(self.theta, self.z + complex(dx, dy), self.dz, self.ddz)

    def scaled(self, s: float) -> "BoundaryDiscretization":
        if s <= 0:
            raise ShapeError("scale factor must be positive")
        return _from_complex(self.theta, s * self.z, s * self.dz, s * self.ddz)


def uniform_theta(n_nodes: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n_nodes) / n_nodes


def _from_complex(theta, z, dz, ddz) -> BoundaryDiscretization:
    speed = np.abs(dz)
    if np.any(speed <= 0):
        raise ShapeError("degenerate parameterization (zero speed)")
    t = dz / speed
    # clockwise rotation of the tangent: outward normal for a counterclockwise curve
    n = -1j * t
    curvature = np.imag(np.conj(dz) * ddz) / speed**3
    w = speed * (2 * np.pi / theta.size)
    return BoundaryDiscretization(
        theta=theta,
        x=z.real.copy(),
        y=z.imag.copy(),
        tangent=np.column_stack([t.real, t.imag]),
        normal=np.column_stack([n.real, n.imag]),
        curvature=curvature,
        speed=speed,
        weights=w,
        dz=dz,
        ddz=ddz,
    )


def discretize(shape: Shape, n_nodes: int) -> BoundaryDiscretization:
    """Sample ``shape`` at ``n_nodes`` uniform parameter values."""
    n_nodes = int(n_nodes)
    if n_nodes % 2 or n_nodes < 4 * shape.max_mode:
        raise ShapeError(f"n_nodes must be even and >= 4*max_mode (got {n_nodes}, K={shape.max_mode})")
    theta = uniform_theta(n_nodes)
    e = np.exp(1j * theta)
    if isinstance(shape, FourierShape):
        eta, d1, d2 = shape.eta(theta, 2)
        r = 1 + eta
        if np.any(r <= 0):
            raise ShapeError("radius 1 + eta must be positive at every node")
        z = r * e
        dz = (d1 + 1j * r) * e
        ddz = (d2 - r + 2j * d1) * e
    elif isinstance(shape, SupportShape):
        h, h1, h2, h3 = shape.support(theta, 3)
        rc = h + h2
        if np.any(h <= 0):
            raise ShapeError("support function must be positive (origin inside the body)")
        if np.any(rc <= 0):
            raise ShapeError("support function violates convexity h'' + h > 0")
        # x = h u + h' u_perp with u = e^{i theta}, u_perp = i u
        z = (h + 1j * h1) * e
        dz = 1j * rc * e
        ddz = (1j * (h1 + h3) - rc) * e
    else:
        raise TypeError(f"unsupported shape type {type(shape).__name__}")
    return _from_complex(theta, z, dz, ddz)


def discretize_parametric(z_fn, dz_fn, ddz_fn, n_nodes: int) -> BoundaryDiscretization:
    """Discretize a curve given as complex-valued functions of theta."""
    theta = uniform_theta(n_nodes)
    return _from_complex(theta, z_fn(theta), dz_fn(theta), ddz_fn(theta))


def curvature_normal_graph(eta, deta, d2eta):
    """Curvature of the normal graph r = 1 + eta at one point (vectorized)."""
    r = 1.0 + np.asarray(eta, dtype=float)
    if np.any(r <= 0):
        raise ShapeError("1 + eta must be positive")
    deta = np.asarray(deta, dtype=float)
    return (r**2 + 2 * deta**2 - r * np.asarray(d2eta, float)) / (r**2 + deta**2) ** 1.5


def perimeter(disc: BoundaryDiscretization) -> float:
    return float(np.sum(disc.weights))


def position_dot_normal(disc: BoundaryDiscretization, origin=(0.0, 0.0)) -> np.ndarray:
    return (disc.x - origin[0]) * disc.normal[:, 0] + (disc.y - origin[1]) * disc.normal[:, 1]


def area(disc: BoundaryDiscretization) -> float:
    """Enclosed area from the divergence form (1/2) int x.n ds."""
    return 0.5 * disc.integrate(position_dot_normal(disc))


# ---------------------------------------------------------------------------
# ellipses E_t with semiaxes e^t, e^-t (area pi)


@dataclass(frozen=True)
class EllipsePoint:
    t: float

    @property
    def a(self) -> float:
        return float(np.exp(self.t))

    @property
    def b(self) -> float:
        return float(np.exp(-self.t))

    @property
    def area(self) -> float:
        return np.pi * self.a * self.b


def ellipse_family(t: float, n_nodes: int = 256) -> tuple[EllipsePoint, BoundaryDiscretization]:
    pt = EllipsePoint(float(t))
    a, b = pt.a, pt.b
    disc = discretize_parametric(
        lambda th: a * np.cos(th) + 1j * b * np.sin(th),
        lambda th: -a * np.sin(th) + 1j * b * np.cos(th),
        lambda th: -a * np.cos(th) - 1j * b * np.sin(th),
        n_nodes,
    )
    return pt, disc


def ellipse_perimeter(t: float, tol: float = 1e-14) -> float:
    """Perimeter of E_t by the periodic trapezoidal rule, refined until converged."""
    if abs(t) >= 5:
        raise ValueError("|t| must be below 5")
    f = lambda th: np.sqrt(np.exp(2 * t) * np.sin(th) ** 2 + np.exp(-2 * t) * np.cos(th) ** 2)
    n, prev = 32, None
    while n <= 2**20:
        val = 2 * np.pi * float(np.mean(f(uniform_theta(n))))
        if prev is not None and abs(val - prev) <= tol * val:
            return val
        prev, n = val, 2 * n
    return prev


def ellipse_log_energy(t: float) -> float:
    """-log cosh t, the logarithmic energy of E_t (capacity (a+b)/2)."""
    at = abs(float(t))
    return -(at + np.log1p(np.exp(-2 * at)) - np.log(2.0))
