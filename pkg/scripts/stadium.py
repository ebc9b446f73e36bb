"""Minimizers of F_We at large We, with and without the convexity constraint.

Above We = 3 the disk stops being a local minimizer.  This script descends
from a slightly elongated disk and reports how the minimizer looks: aspect
ratio, the fraction of the boundary that is nearly flat, and the curvature at
the two ends.  Convex minimizers come out stadium-like: two almost straight
sides joined by rounded caps whose radius of curvature sits on the imposed
floor, so the cap size reflects --floor rather than a free equilibrium.

    python3 scripts/stadium.py --we 4,6,8 --modes 24 --out stadium_out
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from hollowbubble import io as hio
from hollowbubble.cli import parse_float_list
from hollowbubble.geometry import FourierShape, SupportShape, discretize
from hollowbubble.minimize import MinimizeConfig, minimize_energy

COLUMNS = ("we", "constraint", "functional", "perimeter", "aspect", "flat_fraction", "end_curvature", "iterations", "message")


def describe(shape, n_nodes: int) -> tuple[float, float, float]:
    disc = discretize(shape, n_nodes)
    # principal axes of the node cloud
    pts = np.column_stack([disc.x - disc.x.mean(), disc.y - disc.y.mean()])
    w, v = np.linalg.eigh(pts.T @ (pts * disc.weights[:, None]))
    proj = pts @ v
    aspect = np.ptp(proj[:, 1]) / np.ptp(proj[:, 0])
    flat = disc.weights[np.abs(disc.curvature) < 0.1].sum() / disc.weights.sum()
    return float(aspect), float(flat), float(disc.curvature.max())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--we", default="4,6,8")
    ap.add_argument("--modes", type=int, default=24)
    ap.add_argument("--nodes", type=int, default=256)
    ap.add_argument("--max-iters", type=int, default=3000)
    ap.add_argument("--amp", type=float, default=0.02)
    ap.add_argument("--floor", type=float, default=0.02, help="lower bound of (h + h'')/h0 in convex mode")
    ap.add_argument("--out", default="stadium_out")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = MinimizeConfig(n_nodes=args.nodes, max_iters=args.max_iters, curvature_floor=args.floor)
    k = args.modes
    rows = []
    for we in parse_float_list(args.we):
        for constraint in ("none", "convex"):
            if constraint == "none":
                init = FourierShape.mode(2, args.amp, k)
            else:
                # h = 1 + c cos 2t has radius of curvature 1 - 3c cos 2t
                init = SupportShape(k, 1.0, np.r_[0.0, args.amp, np.zeros(k - 2)], np.zeros(k))
            res = minimize_energy(we, init, constraint, cfg)
            aspect, flat, kappa = describe(res.shape, args.nodes)
            rows.append([we, constraint, res.functional, res.perimeter, aspect, flat, kappa, len(res.history), res.message])
            hio.save_shape(res.shape, out / f"stadium_we{we:g}_{constraint}.json", we=we)
            print(
                f"We={we:g} {constraint:6s} F-2pi={res.functional - 2 * np.pi:+.4f} aspect={aspect:.3f} "
                f"flat={flat:.2f} max H={kappa:.2f} ({res.message})"
            )
    (out / "stadium.csv").write_text(hio.to_csv(COLUMNS, rows, vars(args)))


if __name__ == "__main__":
    main()
