"""Follow the non-circular branches born at We = 3, 4, ... and summarize them.

For each m the script switches onto the branch at We = m, continues it to
We = m + span, and writes one CSV per branch plus a summary of the end point
(amplitude, dominant mode, lambda, F_We relative to the disk, residuals).

    python3 scripts/branches.py --m 3,4 --span 0.2 --out branches_out
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

import numpy as np

from hollowbubble import io as hio
from hollowbubble.solve import BRANCH_COLUMNS, SolverConfig, branch_rows, certify, switch_branch


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", default="3,4")
    ap.add_argument("--span", type=float, default=0.2)
    ap.add_argument("--modes", type=int, default=64)
    ap.add_argument("--nodes", type=int, default=256)
    ap.add_argument("--out", default="branches_out")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for m in (int(x) for x in args.m.split(",")):
        cfg = SolverConfig(max_mode=args.modes, n_nodes=args.nodes)
        t0 = time.perf_counter()
        branch = switch_branch(m, m + args.span, cfg)
        end = branch[-1]
        (out / f"branch_m{m}.csv").write_text(hio.to_csv(BRANCH_COLUMNS, branch_rows(branch), {**vars(args), "m": m}))
        hio.save_shape(end.shape, out / f"branch_m{m}_end.json", we=end.we, **{"lambda": end.lam})
        ok = all(certify(p) for p in branch)
        print(
            f"m={m}: {len(branch)} points, {branch.end_reason}, {time.perf_counter() - t0:.1f}s\n"
            f"  end We={end.we:.4f} lambda={end.lam:.6f} F-2pi={end.report.functional - 2 * np.pi:+.3e} "
            f"amplitude={end.max_mode_amplitude:.4f} dominant mode={end.dominant_mode}\n"
            f"  max jump residual {max(p.jump_residual_norm for p in branch):.1e}, certified: {ok}"
        )


if __name__ == "__main__":
    main()
