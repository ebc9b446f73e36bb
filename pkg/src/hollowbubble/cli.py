"""Command-line experiments: ``hollowbubble <command> [options]``.

Exit codes: 0 success, 1 a checked criterion failed, 2 usage or input error.
Output files go to ``--out`` (default ``$HOLLOWBUBBLE_OUT`` or
``./hollowbubble_out``) and every file records the resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io as hio
from .energy import SCAN_COLUMNS, identity_report, report_row
from .geometry import FourierShape, ShapeError, SupportShape, discretize, ellipse_family, ellipse_log_energy, ellipse_perimeter
from .minimize import HISTORY_COLUMNS, MinimizeConfig, minimize_energy
from .potential import EquilibriumSolverError, diagnostics, solve_equilibrium
from .solve import BRANCH_COLUMNS, SolverConfig, branch_rows, certify, continue_branch, newton_solve, switch_branch
from .spectrum import dispersion, ellipse_energy, ellipse_quartic_check, second_variation_fd

OUT_ENV = "HOLLOWBUBBLE_OUT"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument grammar


def parse_float_list(text: str) -> list[float]:
    """'0,1,2' -> [0, 1, 2]; 'a:b:step' -> inclusive range; a single number."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = [float(x) for x in part.split(":")]
            if len(bits) == 2:
                bits.append((bits[1] - bits[0]) / 10 if bits[1] != bits[0] else 1.0)
            lo, hi, step = bits
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            n = int(np.floor((hi - lo) / step + 1e-9))
            out.extend(lo + step * np.arange(n + 1))
        else:
            out.append(float(part))
    if not out:
        raise UsageError(f"empty value list {text!r}")
    return [float(x) for x in out]


_TERM = re.compile(r"^(cos|sin)(\d+):([-+0-9.eE]+)$")


def parse_init(text: str, max_mode: int, convex: bool = False):
    """Initial shape from 'disk', 'cos3:0.2', 'cos2:0.05+sin4:0.01',
    'random:seed=7[,amp=0.1,modes=6]' or 'file:path.json'."""
    text = text.strip()
    if text.startswith("file:"):
        shape = hio.load_shape(text[5:])
        want = SupportShape if convex else FourierShape
        if not isinstance(shape, want):
            raise UsageError(f"{text}: expected a {want.__name__} for this constraint")
        return shape.resized(max_mode) if isinstance(shape, FourierShape) else shape
    a = np.zeros(max_mode)
    b = np.zeros(max_mode)
    if text.startswith("random"):
        opts = dict(seed="0", amp="0.1", modes=str(min(6, max_mode)))
        if ":" in text:
            for kv in text.split(":", 1)[1].split(","):
                if "=" not in kv:
                    raise UsageError(f"bad random option {kv!r} (use key=value)")
                key, val = kv.split("=", 1)
                if key not in opts:
                    raise UsageError(f"unknown random option {key!r}")
                opts[key] = val
        rng = np.random.default_rng(int(opts["seed"]))
        modes = min(int(opts["modes"]), max_mode)
        amp = float(opts["amp"])
        k = np.arange(2, modes + 1)
        ca, cb = rng.uniform(-1, 1, k.size), rng.uniform(-1, 1, k.size)
        if convex:
            # keep h + h'' > 0: sum over modes of (k^2 - 1)|c_k| stays below amp
            scale = amp / np.sum((k**2 - 1) * (np.abs(ca) + np.abs(cb)))
        else:
            scale = amp / np.sum(np.abs(ca) + np.abs(cb))
        a[k - 1], b[k - 1] = scale * ca, scale * cb
    elif text != "disk":
        for term in text.split("+"):
            m = _TERM.match(term.strip())
            if not m:
                raise UsageError(f"cannot parse init term {term!r}")
            k, amp = int(m.group(2)), float(m.group(3))
            if not 1 <= k <= max_mode:
                raise UsageError(f"mode {k} outside 1..{max_mode}")
            (a if m.group(1) == "cos" else b)[k - 1] += amp
    if convex:
        return SupportShape(max_mode, 1.0, a, b)
    return FourierShape(max_mode, 0.0, a, b)


# ---------------------------------------------------------------------------
# helpers


def _out_dir(args) -> Path:
    path = Path(args.out or os.environ.get(OUT_ENV) or "hollowbubble_out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_table(args, name: str, columns, rows) -> Path:
    out = _out_dir(args)
    if args.format == "json":
        path = out / f"{name}.json"
        path.write_text(hio.to_json({"columns": list(columns), "rows": rows}, _config(args)) + "\n")
    else:
        path = out / f"{name}.csv"
        path.write_text(hio.to_csv(columns, rows, _config(args)))
    return path


def _write_json(args, name: str, record: dict) -> Path:
    path = _out_dir(args) / f"{name}.json"
    path.write_text(hio.to_json(record, _config(args)) + "\n")
    return path


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# commands


def _spectrum_row(job):
    k, we, eps = job
    m = dispersion(k, we)
    fd = second_variation_fd(we, k, eps) if abs(k) >= 2 else m.eigenvalue
    return [k, we, m.eigenvalue, fd, abs(fd - m.eigenvalue), m.tag]


def cmd_spectrum(args) -> int:
    if args.kmax < 1:
        raise UsageError("--kmax must be at least 1")
    tol = 1e-3 if args.tol is None else args.tol
    jobs = [(k, we, args.eps) for we in parse_float_list(args.we) for k in range(1, args.kmax + 1)]
    rows = _pmap(_spectrum_row, jobs, args.jobs)
    path = _write_table(args, "spectrum", ("k", "we", "eigenvalue_formula", "eigenvalue_fd", "abs_err", "tag"), rows)
    bad = [r for r in rows if not r[4] < tol]
    for r in rows:
        if r[5] in ("bifurcation", "translation"):
            print(f"k={r[0]} We={r[1]:g}: eigenvalue {r[2]:g} [{r[5]}]")
    print(f"{len(rows)} rows -> {path}")
    if bad:
        for r in bad:
            print(f"FAIL k={r[0]} We={r[1]:g}: formula {r[2]:.6g} fd {r[3]:.6g} err {r[4]:.2e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _load_report(args):
    shape = hio.load_shape(args.shape_file)
    if isinstance(shape, FourierShape):
        shape = shape.resized(max(shape.max_mode, 2))
    nodes = args.nodes or max(256, 4 * shape.max_mode)
    disc = discretize(shape, nodes)
    sol = solve_equilibrium(disc, with_condition=True)
    return shape, disc, sol, identity_report(disc, sol, args.we)


def cmd_validate(args) -> int:
    tol = 1e-7 if args.tol is None else args.tol
    _, disc, sol, rep = _load_report(args)
    ids = rep.identity_residuals
    checks = {
        "flux": abs(ids.flux) < tol,
        "pohozaev": abs(ids.pohozaev) < tol,
        "minkowski_1": abs(ids.minkowski_1) < tol,
        "minkowski_2": abs(ids.minkowski_2) < tol,
        "cauchy_schwarz": ids.cauchy_schwarz_slack >= -1e-9,
    }
    record = {"report": rep.to_dict(), "checks": checks, "condition_number": sol.condition_number}
    path = _write_json(args, Path(args.shape_file).stem + "_validate", record)
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    if ids.flux_l2 is not None:
        print(f"flux_l2 residual {ids.flux_l2:.3e} (vanishes only on solutions)")
    print(f"report -> {path}")
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_energy(args) -> int:
    _, _, sol, rep = _load_report(args)
    path = _write_json(args, Path(args.shape_file).stem + "_energy", rep.to_dict())
    print(rep.to_json())
    print(f"report -> {path}", file=sys.stderr)
    return EXIT_OK


def cmd_capacity(args) -> int:
    shape = hio.load_shape(args.shape_file)
    nodes = args.nodes or max(256, 4 * shape.max_mode)
    disc = discretize(shape, nodes)
    diag = diagnostics(disc)
    diag["log_energy"] = diag["robin_constant"]
    print(json.dumps(diag, indent=2))
    _write_json(args, Path(args.shape_file).stem + "_capacity", diag)
    return EXIT_OK


def cmd_minimize(args) -> int:
    if args.we < 0:
        raise UsageError("--we must be nonnegative")
    modes = args.modes or 16
    convex = args.constraint == "convex"
    initial = parse_init(args.init, modes, convex)
    cfg = MinimizeConfig(
        n_nodes=args.nodes or max(128, 4 * modes),
        max_iters=args.max_iters,
        grad_tol=1e-7 if args.tol is None else args.tol,
    )
    res = minimize_energy(args.we, initial, args.constraint, cfg)
    stem = f"minimize_we{args.we:g}_{args.constraint}"
    out = _out_dir(args)
    hio.save_shape(res.shape, out / f"{stem}_shape.json", config=_config(args))
    _write_json(args, f"{stem}_report", {**res.report.to_dict(), "converged": res.converged, "message": res.message})
    _write_table(args, f"{stem}_history", HISTORY_COLUMNS, [[h.get(c, "") for c in HISTORY_COLUMNS] for h in res.history])
    p, f = res.report.perimeter, res.report.functional
    disk = p - 2 * np.pi < 1e-6
    print(f"We={args.we:g} constraint={args.constraint}: {res.message} after {len(res.history)} iterations")
    print(f"F - 2pi = {f - 2 * np.pi:.3e}   P - 2pi = {p - 2 * np.pi:.3e}   {'disk' if disk else 'non-circular'}")
    if not disk:
        amp = np.hypot(res.shape.a, res.shape.b)
        print(f"dominant mode {int(np.argmax(amp)) + 1} (amplitude {amp.max():.3g})")
    print(f"outputs -> {out}/{stem}_*")
    return EXIT_OK if res.converged or res.message.startswith("maximum") else EXIT_FAIL


def cmd_branch(args) -> int:
    out = _out_dir(args)
    if args.trivial:
        if args.m is not None:
            raise UsageError("--trivial and --m are exclusive")
        wes = parse_float_list(args.we or "0:2.9")
        modes = args.modes or 8
        cfg = SolverConfig(max_mode=modes, n_nodes=args.nodes or max(64, 4 * modes))
        start = newton_solve(FourierShape.disk(modes), 1.0, wes[0], cfg)
        points = continue_branch(start, wes[-1], cfg).points
        name = "branch_trivial"
        ok = all(abs(p.lam - (1 - p.we / 2)) < 1e-9 and p.is_circular() for p in points)
        ok &= len({p.det_sign for p in points[1:]}) <= 1
    else:
        if args.m is None:
            raise UsageError("give --m M (integer >= 3) or --trivial")
        if args.m < 3:
            raise UsageError("--m must be an integer >= 3: bifurcations from the disk occur at We = 3, 4, ...")
        if args.to is None:
            raise UsageError("--to WE_TARGET is required")
        # large-amplitude shapes have slowly decaying radial coefficients
        modes = args.modes or (64 if args.to <= args.m + 0.25 else 128)
        cfg = SolverConfig(max_mode=modes, n_nodes=args.nodes or max(256, 4 * modes))
        branch = switch_branch(args.m, args.to, cfg)
        points = branch.points
        name = f"branch_m{args.m}"
        print(f"branch end: {branch.end_reason}")
        ok = all(certify(p) and p.we > 2 for p in points)
    shape_dir = out / name
    shape_dir.mkdir(exist_ok=True)
    for i, p in enumerate(points):
        hio.save_shape(p.shape, shape_dir / f"point_{i:03d}.json", we=p.we, **{"lambda": p.lam}, config=_config(args))
    path = _write_table(args, name, BRANCH_COLUMNS, branch_rows(points))
    for p in points:
        ids = p.identity_residuals
        print(
            f"We={p.we:.6f} lambda={p.lam:.6f} amp={p.max_mode_amplitude:.4f} "
            f"jump={p.jump_residual_norm:.1e} flux_l2={0.0 if ids.flux_l2 is None else ids.flux_l2:.1e}"
        )
    print(f"{len(points)} points -> {path}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ellipse_scan(args) -> int:
    ts = parse_float_list(args.t)
    tol = 1e-8 if args.tol is None else args.tol
    rows = []
    ok = True
    nodes = args.nodes or 256
    for t in ts:
        p, i = ellipse_perimeter(t), ellipse_log_energy(t)
        f_closed = p + args.we * np.pi * i
        _, disc = ellipse_family(t, nodes)
        sol = solve_equilibrium(disc)
        f_num = disc.weights.sum() + args.we * np.pi * sol.robin_constant
        expansion = 2 * np.pi + 0.5 * np.pi * (3 - args.we) * t**2 + np.pi * (8 * args.we + 3) / 96 * t**4
        ok &= abs(f_num - f_closed) < tol
        rows.append([t, p, i, f_closed, f_num, expansion, f_closed - expansion])
    path = _write_table(args, f"ellipse_we{args.we:g}", ("t", "perimeter", "log_energy", "functional", "functional_numeric", "expansion", "remainder"), rows)
    fit_t = [t for t in ts if 0 < t <= 0.3]
    if len(fit_t) >= 3:
        fit = ellipse_quartic_check(args.we, fit_t)
        c2_ok = fit.c2_rel_err < 0.01 if fit.c2_expected else abs(fit.c2) < 1e-4
        c4_ok = fit.c4_rel_err < 0.01
        ok &= c2_ok and c4_ok
        print(f"t^2 coefficient {fit.c2:.6g} (expected {fit.c2_expected:.6g}) {'PASS' if c2_ok else 'FAIL'}")
        print(f"t^4 coefficient {fit.c4:.6g} (expected {fit.c4_expected:.6g}) {'PASS' if c4_ok else 'FAIL'}")
        _write_json(args, f"ellipse_we{args.we:g}_fit", fit.__dict__)
    for r in rows if len(rows) <= 5 else []:
        print(f"t={r[0]:g}: F closed form {r[3]:.15g}, boundary integral {r[4]:.15g}")
    print(f"{len(rows)} rows -> {path}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nodes", type=int, help="number of boundary nodes N")
    common.add_argument("--modes", type=int, help="number of Fourier modes K")
    common.add_argument("--tol", type=float, help="pass/fail tolerance of the command")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./hollowbubble_out)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hollowbubble", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="dispersion relation vs finite-difference second variation")
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--we", default="0,1,2,3,4,5")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_spectrum)

    for name, fn, hlp in (
        ("validate", cmd_validate, "check the universal identities on a shape file"),
        ("energy", cmd_energy, "full energy/identity report of a shape file"),
    ):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("shape_file")
        p.add_argument("--we", type=float, default=0.0)
        p.set_defaults(func=fn)

    p = sub.add_parser("capacity", parents=[common], help="logarithmic energy and capacity of a shape file")
    p.add_argument("shape_file")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("minimize", parents=[common], help="minimize F_We at area pi")
    p.add_argument("--we", type=float, required=True)
    p.add_argument("--init", default="random:seed=0")
    p.add_argument("--constraint", choices=("none", "convex"), default="none")
    p.add_argument("--max-iters", type=int, default=2000)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("branch", parents=[common], help="continue critical points in We")
    p.add_argument("--m", type=int, help="bifurcation point We = m >= 3")
    p.add_argument("--to", type=float, help="target Weber number")
    p.add_argument("--trivial", action="store_true", help="follow the disk branch instead")
    p.add_argument("--we", help="We range for --trivial, e.g. 0:2.9")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("ellipse-scan", parents=[common], help="F_We on the ellipse family and its expansion")
    p.add_argument("--we", type=float, required=True)
    p.add_argument("--t", default="0:0.25:0.01")
    p.set_defaults(func=cmd_ellipse_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, hio.ShapeFileError, ShapeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EquilibriumSolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
