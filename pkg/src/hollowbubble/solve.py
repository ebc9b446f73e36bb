"""Critical points of F_We: Newton iteration and pseudo-arclength continuation.

Unknowns are the Fourier coefficients of eta with the translation modes
k = +-1 removed, plus lambda.  The equations are the Fourier coefficients of
the nodal jump residual on the same modes, plus the area constraint.  With
``symmetry = m >= 2`` only cos(j m theta) modes are kept, which fixes the
rotation phase and isolates branches with m-fold dihedral symmetry.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .energy import EnergyReport, identity_report, jump_residual
from .geometry import FourierShape, ShapeError, discretize
from .potential import solve_equilibrium
from .spectrum import bifurcation_points

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class DivergenceError(SolverError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class SingularJacobianError(SolverError):
    """Jacobian is numerically singular, e.g. at a bifurcation point; switch branches."""


class GaugeError(ValueError):
    pass


class RigidityViolation(AssertionError):
    """A certified non-circular critical point with We <= 2 contradicts global rigidity."""


@dataclass(frozen=True)
class SolverConfig:
    max_mode: int = 16
    n_nodes: int = 128
    newton_tol: float = 1e-10
    max_newton_iters: int = 25
    fd_jacobian_step: float = 1e-6
    continuation_step: float = 0.05
    min_step: float = 1e-4
    max_step: float = 0.2
    target_iters: int = 4
    symmetry: int = 0
    min_radius: float = 0.05
    singular_rcond: float = 1e-9

    def __post_init__(self):
        if self.n_nodes < 4 * self.max_mode or self.n_nodes % 2:
            raise ValueError("n_nodes must be even and at least 4 * max_mode")
        if min(self.newton_tol, self.fd_jacobian_step, self.continuation_step, self.min_step) <= 0:
            raise ValueError("tolerances and steps must be positive")
        if self.symmetry < 0 or self.symmetry == 1:
            raise ValueError("symmetry must be 0 (none) or >= 2")


def _cos_modes(cfg: SolverConfig) -> np.ndarray:
    if cfg.symmetry >= 2:
        return np.arange(cfg.symmetry, cfg.max_mode + 1, cfg.symmetry)
    return np.arange(2, cfg.max_mode + 1)


def _sin_modes(cfg: SolverConfig) -> np.ndarray:
    if cfg.symmetry >= 2:
        return np.arange(0)
    return np.arange(2, cfg.max_mode + 1)


def n_unknowns(cfg: SolverConfig) -> int:
    return 2 + _cos_modes(cfg).size + _sin_modes(cfg).size


def pack(shape: FourierShape, lam: float, cfg: SolverConfig) -> np.ndarray:
    check_gauge(shape, cfg)
    shape = shape.resized(cfg.max_mode)
    return np.concatenate([[shape.a0], shape.a[_cos_modes(cfg) - 1], shape.b[_sin_modes(cfg) - 1], [lam]])


def unpack(u: np.ndarray, cfg: SolverConfig) -> tuple[FourierShape, float]:
    cm, sm = _cos_modes(cfg), _sin_modes(cfg)
    a = np.zeros(cfg.max_mode)
    b = np.zeros(cfg.max_mode)
    a[cm - 1] = u[1 : 1 + cm.size]
    b[sm - 1] = u[1 + cm.size : 1 + cm.size + sm.size]
    return FourierShape(cfg.max_mode, u[0], a, b), float(u[-1])


def check_gauge(shape: FourierShape, cfg: SolverConfig, tol: float = 1e-12) -> None:
    if shape.max_mode >= 1 and max(abs(shape.a[0]), abs(shape.b[0])) > tol:
        raise GaugeError("translation modes eta_hat(+-1) must vanish")
    keep_a = np.zeros(shape.max_mode, bool)
    keep_b = np.zeros(shape.max_mode, bool)
    keep_a[_cos_modes(cfg)[_cos_modes(cfg) <= shape.max_mode] - 1] = True
    keep_b[_sin_modes(cfg)[_sin_modes(cfg) <= shape.max_mode] - 1] = True
    if np.any(np.abs(shape.a[~keep_a]) > tol) or np.any(np.abs(shape.b[~keep_b]) > tol):
        raise GaugeError(f"shape has modes outside the basis of symmetry {cfg.symmetry}")


def residual_system(shape: FourierShape, lam: float, we: float, cfg: SolverConfig) -> np.ndarray:
    """Fourier coefficients of the jump residual on the unknown modes, then area - pi."""
    check_gauge(shape, cfg)
    disc = discretize(shape.resized(cfg.max_mode), cfg.n_nodes)
    sol = solve_equilibrium(disc)
    r = jump_residual(disc, sol, we, lam)
    th = disc.theta
    cm, sm = _cos_modes(cfg), _sin_modes(cfg)
    out = [np.mean(r)]
    out.extend(2 * np.mean(r[None, :] * np.cos(np.outer(cm, th)), axis=1))
    out.extend(2 * np.mean(r[None, :] * np.sin(np.outer(sm, th)), axis=1))
    out.append(shape.area() - np.pi)
    return np.asarray(out)


def _residual_u(u: np.ndarray, we: float, cfg: SolverConfig) -> np.ndarray:
    shape, lam = unpack(u, cfg)
    if shape.min_radius(cfg.n_nodes) < cfg.min_radius:
        raise ShapeError("radius fell below the admissible floor")
    return residual_system(shape, lam, we, cfg)


def _fd_jacobian(fun, x: np.ndarray, f0: np.ndarray, step: float) -> np.ndarray:
    jac = np.empty((f0.size, x.size))
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        jac[:, i] = (fun(xp) - f0) / h
    return jac


def _rcond(jac: np.ndarray) -> float:
    s = np.linalg.svd(jac, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def _damped_newton(fun, x0: np.ndarray, cfg: SolverConfig, check_singular: bool = True):
    """Newton with forward-difference Jacobian and step halving on the residual norm.

    Returns (x, residual, iterations).
    """
    x = np.array(x0, dtype=float)
    f = fun(x)
    norm = np.max(np.abs(f))
    for it in range(cfg.max_newton_iters + 1):
        if norm < cfg.newton_tol:
            return x, f, it
        if it == cfg.max_newton_iters:
            break
        jac = _fd_jacobian(fun, x, f, cfg.fd_jacobian_step)
        if check_singular and _rcond(jac) < cfg.singular_rcond:
            raise SingularJacobianError(f"singular Jacobian (rcond {_rcond(jac):.2e}); a branch switch is needed")
        dx = np.linalg.lstsq(jac, -f, rcond=None)[0]
        alpha = 1.0
        while alpha > 1e-4:
            try:
                xn = x + alpha * dx
                fn = fun(xn)
                nn = np.max(np.abs(fn))
            except (ShapeError, np.linalg.LinAlgError):
                nn = np.inf
            if nn < norm or nn < cfg.newton_tol:
                break
            alpha *= 0.5
        else:
            raise DivergenceError("line search failed", norm)
        x, f, norm = xn, fn, nn
    raise DivergenceError(f"no convergence in {cfg.max_newton_iters} iterations", norm)


@dataclass
class BranchPoint:
    we: float
    lam: float
    shape: FourierShape
    jump_residual_norm: float
    report: EnergyReport
    arclength_param: float = 0.0
    symmetry: int = 0
    newton_iters: int = 0
    det_sign: int = 0  # sign of the (augmented) Jacobian determinant; flips across bifurcations

    @property
    def identity_residuals(self):
        return self.report.identity_residuals

    @property
    def mode_amplitudes(self) -> np.ndarray:
        """sqrt(a_k^2 + b_k^2) for k = 1..K."""
        return np.hypot(self.shape.a, self.shape.b)

    @property
    def max_mode_amplitude(self) -> float:
        return float(self.mode_amplitudes.max())

    @property
    def dominant_mode(self) -> int:
        return int(np.argmax(self.mode_amplitudes)) + 1

    def is_circular(self, tol: float = 1e-6) -> bool:
        return self.max_mode_amplitude < tol


def make_point(shape: FourierShape, lam: float, we: float, cfg: SolverConfig, s: float = 0.0, iters: int = 0) -> BranchPoint:
    disc = discretize(shape, cfg.n_nodes)
    sol = solve_equilibrium(disc)
    res = jump_residual(disc, sol, we, lam)
    pt = BranchPoint(
        we=float(we),
        lam=float(lam),
        shape=shape,
        jump_residual_norm=float(np.sqrt(disc.integrate(res**2))),
        report=identity_report(disc, sol, we),
        arclength_param=float(s),
        symmetry=cfg.symmetry,
        newton_iters=iters,
    )
    _rigidity_check(pt)
    return pt


def _rigidity_check(pt: BranchPoint) -> None:
    if pt.we <= 2 and not pt.is_circular(1e-5) and pt.jump_residual_norm < 1e-6:
        raise RigidityViolation(
            f"non-circular critical point at We={pt.we} (amplitude {pt.max_mode_amplitude:.3e}); "
            "this contradicts global rigidity and indicates a bug"
        )


def newton_solve(initial: FourierShape, lambda0: float, we: float, cfg: SolverConfig = SolverConfig()) -> BranchPoint:
    """Damped Newton on ``residual_system`` at fixed We."""
    u0 = pack(initial, lambda0, cfg)
    u, _, iters = _damped_newton(lambda u: _residual_u(u, we, cfg), u0, cfg)
    shape, lam = unpack(u, cfg)
    return make_point(shape, lam, we, cfg, iters=iters)


# ---------------------------------------------------------------------------
# continuation


@dataclass
class Branch:
    points: list[BranchPoint] = field(default_factory=list)
    end_reason: str = "target reached"

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def _ext_residual(v: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    return _residual_u(v[:-1], v[-1], cfg)


def _tangent(jac_ext: np.ndarray, prev: np.ndarray) -> np.ndarray:
    aug = np.vstack([jac_ext, prev[None, :]])
    rhs = np.zeros(aug.shape[0])
    rhs[-1] = 1.0
    t = np.linalg.solve(aug, rhs)
    return t / np.linalg.norm(t)


def _corrector(v_pred: np.ndarray, tangent: np.ndarray, cfg: SolverConfig):
    def fun(v):
        return np.append(_ext_residual(v, cfg), tangent @ (v - v_pred))

    return _damped_newton(fun, v_pred, cfg, check_singular=False)


def _fixed_we_point(v_guess: np.ndarray, we: float, cfg: SolverConfig):
    u, _, it = _damped_newton(lambda u: _residual_u(u, we, cfg), v_guess[:-1], cfg, check_singular=False)
    return np.append(u, we), it


def _pseudo_arclength(v0, t0, we_target, cfg, s0=0.0, max_points=400, on_point=None) -> Branch:
    """March from v0 along tangent t0 (oriented towards we_target)."""
    branch = Branch()
    v, t, s, ds = v0, t0, s0, cfg.continuation_step
    direction = np.sign(we_target - v0[-1]) or 1.0
    for _ in range(max_points):
        if abs(v[-1] - we_target) < 1e-12:
            return branch
        try:
            v_new, _, iters = _corrector(v + ds * t, t, cfg)
            ok = iters <= cfg.max_newton_iters
        except (DivergenceError, ShapeError, np.linalg.LinAlgError):
            ok = False
        if not ok:
            ds *= 0.5
            if ds < cfg.min_step:
                branch.end_reason = f"step underflow at We={v[-1]:.6g}"
                log.warning(branch.end_reason)
                return branch
            continue
        crossed = (v_new[-1] - we_target) * direction > 0
        if crossed:
            frac = (we_target - v[-1]) / (v_new[-1] - v[-1])
            v_new, iters = _fixed_we_point(v + frac * (v_new - v), we_target, cfg)
        s += np.linalg.norm(v_new - v)
        jac = _fd_jacobian(lambda w: _ext_residual(w, cfg), v_new, _ext_residual(v_new, cfg), cfg.fd_jacobian_step)
        t_new = _tangent(jac, t)
        if t_new @ (v_new - v) < 0:
            t_new = -t_new
        v, t = v_new, t_new
        shape, lam = unpack(v[:-1], cfg)
        pt = make_point(shape, lam, v[-1], cfg, s, iters)
        pt.det_sign = int(np.linalg.slogdet(np.vstack([jac, t[None, :]]))[0])
        branch.points.append(pt)
        if on_point is not None:
            on_point(pt)
        if crossed:
            return branch
        if iters <= cfg.target_iters - 2:
            ds = min(1.5 * ds, cfg.max_step)
        elif iters > cfg.target_iters:
            ds = max(0.5 * ds, cfg.min_step)
    branch.end_reason = "maximum number of points"
    return branch


def continue_branch(start: BranchPoint, we_target: float, cfg: SolverConfig = SolverConfig(), **kw) -> Branch:
    """Pseudo-arclength continuation in (shape, lambda, We) from a converged point."""
    if start.jump_residual_norm > 1e-6:
        raise SolverError("start point is not converged")
    cfg = replace(cfg, symmetry=start.symmetry)
    v0 = np.append(pack(start.shape, start.lam, cfg), start.we)
    jac = _fd_jacobian(lambda w: _ext_residual(w, cfg), v0, _ext_residual(v0, cfg), cfg.fd_jacobian_step)
    guess = np.zeros(v0.size)
    guess[-1] = np.sign(we_target - start.we) or 1.0
    t0 = _tangent(jac, guess)
    if t0[-1] * guess[-1] < 0:
        t0 = -t0
    branch = _pseudo_arclength(v0, t0, we_target, cfg, start.arclength_param, **kw)
    branch.points.insert(0, start)
    return branch


def trivial_branch(we_values, cfg: SolverConfig = SolverConfig()) -> list[BranchPoint]:
    """Disks along a We grid, each solved by Newton from the previous point.

    Also records the sign of the Jacobian determinant: a sign change between
    consecutive points would reveal a bifurcation inside the interval.
    """
    points = []
    shape, lam = FourierShape.disk(cfg.max_mode), 1.0
    for we in we_values:
        pt = newton_solve(shape, lam, we, cfg)
        u = pack(pt.shape, pt.lam, cfg)
        jac = _fd_jacobian(lambda w: _residual_u(w, we, cfg), u, _residual_u(u, we, cfg), cfg.fd_jacobian_step)
        pt.det_sign = int(np.sign(np.linalg.slogdet(jac)[0]))
        points.append(pt)
        shape, lam = pt.shape, pt.lam
    return points


def switch_branch(m: int, we_target: float, cfg: SolverConfig = SolverConfig(), amplitude: float = 0.02, **kw) -> Branch:
    """Leave the disk branch at the bifurcation We = m along the kernel mode m - 1.

    The first two points fix the cos((m-1) theta) amplitude and solve for We;
    pseudo-arclength continuation takes over from there.
    """
    if int(m) != m or m < 3:
        raise ValueError("bifurcations occur only at integer We = m >= 3")
    m = int(m)
    (bp,) = bifurcation_points(m, m)
    k = bp.kernel_modes[0]
    cfg = replace(cfg, symmetry=k)
    idx = 1  # position of the cos(k theta) coefficient in the unknown vector

    def seeded(amp, guess):
        def fun(w):
            v = np.insert(w, idx, amp)
            return _ext_residual(v, cfg)

        w0 = np.delete(guess, idx)
        w, _, it = _damped_newton(fun, w0, cfg, check_singular=False)
        return np.insert(w, idx, amp), it

    disk = np.append(pack(FourierShape.disk(cfg.max_mode), 1 - m / 2, cfg), float(m))
    g1 = disk.copy()
    g1[idx] = amplitude
    v1, it1 = seeded(amplitude, g1)
    v2, it2 = seeded(2 * amplitude, 2 * v1 - disk)
    secant = v2 - v1
    if secant[-1] * (we_target - v2[-1]) < 0:
        # the branch leaves in the other We direction; follow it anyway
        log.info("branch from We=%d bends away from the target", m)
    pts = []
    for v, it, s in ((v1, it1, 0.0), (v2, it2, float(np.linalg.norm(secant)))):
        shape, lam = unpack(v[:-1], cfg)
        pts.append(make_point(shape, lam, v[-1], cfg, s, it))
    jac = _fd_jacobian(lambda w: _ext_residual(w, cfg), v2, _ext_residual(v2, cfg), cfg.fd_jacobian_step)
    t = _tangent(jac, secant / np.linalg.norm(secant))
    if t @ secant < 0:
        t = -t
    branch = _pseudo_arclength(v2, t, we_target, cfg, pts[-1].arclength_param, **kw)
    branch.points[:0] = pts
    return branch


BRANCH_COLUMNS = (
    "arclength_param", "we", "lambda", "perimeter", "log_energy", "functional", "max_mode_amplitude",
    "dominant_mode", "jump_residual_norm", "flux", "pohozaev", "minkowski_1", "minkowski_2", "flux_l2",
    "cauchy_schwarz_slack", "det_sign",
)


def branch_rows(points) -> list[list]:
    rows = []
    for p in points:
        rep, ids = p.report, p.identity_residuals
        rows.append([
            p.arclength_param, p.we, p.lam, rep.perimeter, rep.log_energy, rep.functional,
            p.max_mode_amplitude, p.dominant_mode if not p.is_circular() else 0, p.jump_residual_norm,
            ids.flux, ids.pohozaev, ids.minkowski_1, ids.minkowski_2,
            "" if ids.flux_l2 is None else ids.flux_l2, ids.cauchy_schwarz_slack, p.det_sign,
        ])
    return rows


def certify(pt: BranchPoint, universal_tol: float = 1e-7, flux_l2_tol: float = 1e-6, jump_tol: float = 1e-6) -> bool:
    """True if the point passes the identity battery of a genuine solution."""
    ids = pt.identity_residuals
    if ids.universal_max() >= universal_tol or pt.jump_residual_norm >= jump_tol:
        return False
    return ids.flux_l2 is None or abs(ids.flux_l2) < flux_l2_tol
