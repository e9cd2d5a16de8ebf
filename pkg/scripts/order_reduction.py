"""Stiffness study on the Prothero-Robinson type delay problem.

For each stiffness parameter, prints observed rates of the two-step methods
against the stage-order-1 continuous RK4 over a halving step sequence.

    python scripts/order_reduction.py [--lam -1 -10 -50] [--h0 0.1] [--levels 6]
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

from tsglm.integrator import observed_order
from tsglm.methods import METHODS
from tsglm.problems import mildly_stiff


@dataclass(frozen=True)
class StiffConfig:
    lams: tuple = (-1.0, -10.0, -50.0)
    h0: float = 0.1
    levels: int = 6
    methods: tuple = field(default=("order4", "order5", "starter"))


def sweep(cfg: StiffConfig):
    hs = [cfg.h0 / 2 ** k for k in range(cfg.levels)]
    table = {}
    for lam in cfg.lams:
        tp = mildly_stiff(lam=lam)
        for name in cfg.methods:
            table[(lam, name)] = observed_order(METHODS[name](), tp.problem, tp.exact, hs)
    return hs, table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="order reduction on mildly_stiff")
    ap.add_argument("--lam", type=float, nargs="+", default=list(StiffConfig.lams))
    ap.add_argument("--h0", type=float, default=StiffConfig.h0)
    ap.add_argument("--levels", type=int, default=StiffConfig.levels)
    args = ap.parse_args(argv)
    cfg = StiffConfig(lams=tuple(args.lam), h0=args.h0, levels=args.levels)
    hs, table = sweep(cfg)
    for lam in cfg.lams:
        print(f"\nlambda = {lam}")
        print(f"{'h':>10} " + " ".join(f"{m + ' err':>14} {'rate':>7}" for m in cfg.methods))
        for k, h in enumerate(hs):
            cells = []
            for m in cfg.methods:
                r = table[(lam, m)][k]
                rate = "" if r.uniform_rate is None or not math.isfinite(r.uniform_rate) else f"{r.uniform_rate:.2f}"
                cells.append(f"{r.uniform_error:>14.3e} {rate:>7}")
            print(f"{h:>10.6f} " + " ".join(cells))
    return 0


if __name__ == "__main__":
    sys.exit(main())
