"""Command-line front end: ``verify``, ``run``, ``order`` and ``export``.

Exit codes: 0 success, 1 runtime or integration failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass

from . import methods, order, problems, tableau
from .integrator import integrate, observed_order, sample
from .poly import format_scalar

EXIT_OK, EXIT_RUNTIME, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    method: str | None
    tableau_path: str | None
    problem: str
    h: float | None = None
    h_list: tuple = ()
    t_end: float | None = None
    out: str | None = None
    probe: int = 33

    def __post_init__(self):
        if self.probe < 2:
            raise InputError("--probe must be at least 2")
        hs = self.h_list
        for a, b in zip(hs, hs[1:]):
            if not (b < a and abs(a / b - 2.0) <= 1e-9):
                raise InputError("--h-list must halve successively (ratio 2, decreasing)")


def _fmt(x: float) -> str:
    return repr(float(x))


def _load_tableau(method: str | None, path: str | None):
    if (method is None) == (path is None):
        raise InputError("give exactly one of --method or --tableau")
    if method is not None:
        try:
            return methods.get_method(method)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    try:
        return tableau.load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_problem(label: str, t_end: float | None):
    factory = problems.PROBLEMS.get(label)
    if factory is None:
        raise InputError(f"unknown problem {label!r}; choose from {sorted(problems.PROBLEMS)}")
    try:
        return factory() if t_end is None else factory(T=t_end)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _open_out(path: str | None):
    return open(path, "w", newline="") if path else _NoClose(sys.stdout)


class _NoClose(io.TextIOBase):
    def __init__(self, stream):
        self._s = stream

    def write(self, s):
        return self._s.write(s)

    def close(self):
        self._s.flush()


def cmd_verify(args) -> int:
    path = args.tableau or args.file
    t = _load_tableau(args.method, path)
    if os.environ.get("TSGLM_EXACT", "1") == "0":
        t = t.to_real()
    rep = order.order_report(t)
    print(order.format_report(t, rep))
    meta = t.metadata
    declared = meta.get("order")
    line = f"uniform order {rep.uniform_order}, stage order {rep.uniform_stage_order}"
    if rep.barrier is not None:
        k, val = rep.barrier
        line += f", (k-1)!*G_{k}(1) = {format_scalar(val)} ≈ {float(val):.10g}"
    print(line)
    if declared is None:
        print("no declared order in metadata")
        return EXIT_OK
    ok = int(declared) == rep.uniform_order
    if "stage_order" in meta:
        ok = ok and int(meta["stage_order"]) == rep.uniform_stage_order
    print(f"declared order {declared}: {'certified' if ok else 'NOT certified'}")
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_run(cfg: RunConfig) -> int:
    t = _load_tableau(cfg.method, cfg.tableau_path)
    tp = _load_problem(cfg.problem, cfg.t_end)
    if cfg.h is None or not cfg.h > 0:
        raise InputError("--h must be a positive number")
    try:
        sol = integrate(t, tp.problem, cfg.h)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not sol.ok:
        print(f"integration failed: {sol.reason}", file=sys.stderr)
        return EXIT_RUNTIME
    ts, ys = sample(sol, cfg.probe)
    with _open_out(cfg.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"y{k + 1}" for k in range(ys.shape[1])])
        for tv, row in zip(ts, ys):
            w.writerow([_fmt(tv)] + [_fmt(x) for x in row])
    end = sol.endpoint() if sol.segments else tp.problem.initial(0.0)
    st = sol.stats
    summary = (f"steps={st['steps']} f_evals={st['f_evals']} "
               f"endpoint=({', '.join(_fmt(x) for x in end)})")
    if st["nonuniform_final_step"]:
        summary += " warning: nonuniform-final-step"
    print(summary, file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def cmd_order(cfg: RunConfig) -> int:
    t = _load_tableau(cfg.method, cfg.tableau_path)
    tp = _load_problem(cfg.problem, cfg.t_end)
    if tp.exact is None:
        raise InputError(f"problem {cfg.problem!r} has no exact solution")
    if len(cfg.h_list) < 3:
        raise InputError("--h-list needs at least 3 step sizes")
    try:
        rows = observed_order(t, tp.problem, tp.exact, cfg.h_list, probe=cfg.probe)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    with _open_out(cfg.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h", "uniform_err", "endpoint_err", "uniform_rate", "endpoint_rate"])
        for r in rows:
            w.writerow([_fmt(r.h), _fmt(r.uniform_error), _fmt(r.endpoint_error),
                        "" if r.uniform_rate is None else _fmt(r.uniform_rate),
                        "" if r.endpoint_rate is None else _fmt(r.endpoint_rate)])
    last = rows[-1]
    print(f"final rate: uniform {last.uniform_rate:.4f}, endpoint {last.endpoint_rate:.4f}",
          file=sys.stdout if cfg.out else sys.stderr)
    bad = [r.h for r in rows if not (math.isfinite(r.uniform_error) and math.isfinite(r.endpoint_error))]
    if bad:
        print(f"integration failed or diverged for h = {bad}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_export(args) -> int:
    t = _load_tableau(args.method, None)
    with _open_out(args.out) as fh:
        fh.write(tableau.serialize(t))
    return EXIT_OK


def _h_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad step-size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsglm", description="Two-step GLM toolkit for delay equations.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="certify the uniform (stage) order of a tableau")
    v.add_argument("file", nargs="?", help="tableau file")
    v.add_argument("--method", choices=sorted(methods.METHODS))
    v.add_argument("--tableau", help="tableau file")

    for name, helptext in (("run", "integrate and write dense samples as CSV"),
                           ("order", "observed convergence rates over halving step sizes")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--method", choices=sorted(methods.METHODS))
        s.add_argument("--tableau", help="tableau file")
        s.add_argument("--problem", required=True, choices=sorted(problems.PROBLEMS))
        if name == "run":
            s.add_argument("--h", type=float, required=True)
        else:
            s.add_argument("--h-list", type=_h_list, required=True,
                           help="comma-separated, each half the previous")
        s.add_argument("--t-end", type=float)
        s.add_argument("--out")
        s.add_argument("--probe", type=int, default=33, help="samples per step (default 33)")

    e = sub.add_parser("export", help="write a built-in method in the tableau file format")
    e.add_argument("--method", required=True, choices=sorted(methods.METHODS))
    e.add_argument("--out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "export":
            return cmd_export(args)
        cfg = RunConfig(args.method, args.tableau, args.problem,
                        h=getattr(args, "h", None), h_list=getattr(args, "h_list", ()),
                        t_end=args.t_end, out=args.out, probe=args.probe)
        return cmd_run(cfg) if args.command == "run" else cmd_order(cfg)
    except tableau.TableauParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
