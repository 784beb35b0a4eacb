"""Command-line front end.

    carasolve solve  --rhs floor --y0 1 --interval 0 1.8333 --grid 4096 --out out/
    carasolve approx --rhs grande_sin --window -2 2 --points 20 --seed 1 --out out/
    carasolve verify --rhs const --param 1 --candidate z.csv --out out/
    carasolve demo sign --interval 0 1 --out out/

Exit codes: 0 success (certified / member / all report checks hold),
2 completed but negative (non-certified, not a member, a check failed),
1 runtime error, 64 usage error.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import CarasolveError, NotCertifiedError
from .gridapprox import convergence_probe, probe_table_csv
from .quadrature import GridFunction, Partition
from .rhs import BUILTIN_NAMES, builtin_rhs, make_problem
from .scenarios import POSITIVE_DEFAULTS, demo_positive, demo_sign, demo_sin
from .solver import SolveOptions, residual, solve_maximal
from .subsolution import verify_subsolution

log = logging.getLogger("carasolve")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_USAGE = 64

DEFAULTS = {
    "rhs": None,
    "param": [],
    "y0": 0.0,
    "interval": None,
    "grid": 1024,
    "tol_iter": 1e-9,
    "tol_res": 1e-6,
    "max_iter": 100_000,
    "seed": 0,
    "out": ".",
    "format": "csv",
    "force_heuristic": False,
    "window": [-2.0, 2.0],
    "points": 20,
    "n_list": [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024],
    "candidate": None,
    "steps": None,
    "n0_max": 1000,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    S = argparse.SUPPRESS
    p.add_argument("--rhs", choices=BUILTIN_NAMES, default=S)
    p.add_argument("--param", type=float, action="append", default=S,
                   help="builtin parameter (repeatable)")
    p.add_argument("--y0", type=float, default=S)
    p.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"), default=S)
    p.add_argument("--grid", type=int, default=S, help="number of uniform cells")
    p.add_argument("--tol-iter", dest="tol_iter", type=float, default=S)
    p.add_argument("--tol-res", dest="tol_res", type=float, default=S)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--force-heuristic", dest="force_heuristic", action="store_true", default=S)
    p.add_argument("--config", default=S, help="JSON file with option defaults")


def build_parser():
    parser = _Parser(prog="carasolve", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="maximal solution by monotone iteration")
    _common(p)

    p = sub.add_parser("approx", help="convergence table of the step approximations f_n")
    _common(p)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), default=argparse.SUPPRESS)
    p.add_argument("--points", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n-list", dest="n_list", type=int, nargs="+", default=argparse.SUPPRESS)

    p = sub.add_parser("verify", help="sub-solution and residual check of a candidate CSV")
    _common(p)
    p.add_argument("--candidate", default=argparse.SUPPRESS)

    p = sub.add_parser("demo", help="counterexample and positive scenarios")
    p.add_argument("name", choices=("sign", "sin", "positive"))
    _common(p)
    p.add_argument("--steps", type=float, nargs="+", default=argparse.SUPPRESS)
    p.add_argument("--n0-max", dest="n0_max", type=int, default=argparse.SUPPRESS)
    return parser


def resolve_config(args):
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    cfg = dict(DEFAULTS)
    flags = vars(args)
    path = flags.get("config")
    if path:
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    cfg.update({k: v for k, v in flags.items() if k != "config"})
    return cfg


def _fmt(v):
    return f"{v:.17g}"


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _write_curve(path, y, column):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", column])
        for x, v in zip(y.nodes, y.values):
            w.writerow([_fmt(x), _fmt(v)])


def _need(cfg, *keys):
    for key in keys:
        if cfg.get(key) is None:
            raise UsageError(f"--{key.replace('_', '-')} is required for {cfg['command']}")


def _interval(cfg):
    lo, hi = (float(v) for v in cfg["interval"])
    if not lo < hi:
        raise UsageError(f"--interval needs LO < HI, got {lo} {hi}")
    return lo, hi


def _options(cfg):
    return SolveOptions(tol_iter=float(cfg["tol_iter"]), tol_res=float(cfg["tol_res"]),
                        max_iter=int(cfg["max_iter"]),
                        force_heuristic=bool(cfg["force_heuristic"]))


def cmd_solve(cfg, out):
    _need(cfg, "rhs", "interval")
    lo, hi = _interval(cfg)
    if int(cfg["grid"]) < 1:
        raise UsageError("--grid must be positive")
    problem = make_problem(cfg["rhs"], cfg["param"], lo, hi, float(cfg["y0"]))
    try:
        result = solve_maximal(problem, Partition.uniform(lo, hi, cfg["grid"]), _options(cfg))
    except NotCertifiedError as exc:
        log.warning("NON-CERTIFIED: %s", exc)
        return EXIT_NEGATIVE
    for msg in result.warnings:
        log.warning("%s", msg)
    payload = {"command": "solve", "rhs": problem.rhs.label, "y0": problem.y0}
    payload.update(result.to_dict())
    _write_json(out / "solve.json", payload)
    (out / "trajectory.csv").write_text(result.trajectory_csv())
    return EXIT_OK if result.certified else EXIT_NEGATIVE


def cmd_approx(cfg, out):
    _need(cfg, "rhs")
    rhs = builtin_rhs(cfg["rhs"], cfg["param"])
    x_lo, x_hi = _interval(cfg) if cfg.get("interval") else (0.0, 1.0)
    y_lo, y_hi = (float(v) for v in cfg["window"])
    if not y_lo < y_hi:
        raise UsageError("--window needs LO < HI")
    if int(cfg["points"]) < 1 or any(int(n) < 1 for n in cfg["n_list"]):
        raise UsageError("--points and --n-list entries must be positive")
    rng = np.random.default_rng(int(cfg["seed"]))
    xs = rng.uniform(x_lo, x_hi, int(cfg["points"]))
    ys = rng.uniform(y_lo, y_hi, int(cfg["points"]))
    rows = convergence_probe(rhs, list(zip(xs, ys)), sorted(int(n) for n in cfg["n_list"]),
                             (y_lo, y_hi))
    if cfg["format"] == "json":
        _write_json(out / "convergence.json", {
            "rhs": rhs.label, "seed": int(cfg["seed"]),
            "rows": [{"x": x, "y": y, "n": n, "deviation": d} for x, y, n, d in rows],
        })
    else:
        (out / "convergence.csv").write_text(probe_table_csv(rows))
    return EXIT_OK


def read_candidate(path):
    """Grid function from a CSV with header; first column ``x``, value column ``z`` or the second."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3:
        raise UsageError(f"{path}: need a header and at least two rows")
    header = [h.strip() for h in rows[0]]
    col = header.index("z") if "z" in header else 1
    try:
        xs = [float(r[0]) for r in rows[1:] if r]
        vs = [float(r[col]) for r in rows[1:] if r]
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{path}: malformed row ({exc})") from exc
    return GridFunction(Partition(xs), vs)


def cmd_verify(cfg, out):
    _need(cfg, "rhs", "candidate")
    z = read_candidate(cfg["candidate"])
    problem = make_problem(cfg["rhs"], cfg["param"], z.partition.a, z.partition.b,
                           float(cfg["y0"]))
    report = verify_subsolution(problem, z, tol=float(cfg["tol_res"]))
    res = residual(problem, z)
    _write_json(out / "verify.json", {
        "command": "verify", "rhs": problem.rhs.label, "y0": problem.y0,
        "interval": [problem.a, problem.b], "subsolution": report.to_dict(),
        "residual": res.to_dict(),
    })
    return EXIT_OK if report.is_member else EXIT_NEGATIVE


def cmd_demo(cfg, out):
    name = cfg["name"]
    if name == "positive":
        which = cfg["rhs"] or "floor"
        if which not in POSITIVE_DEFAULTS:
            raise UsageError(f"demo positive supports {', '.join(sorted(POSITIVE_DEFAULTS))}")
        flags = cfg["_explicit"]
        kw = {}
        if "interval" in flags:
            kw["a"], kw["b"] = _interval(cfg)
        if "y0" in flags:
            kw["y0"] = float(cfg["y0"])
        if "grid" in flags:
            kw["grid"] = int(cfg["grid"])
        if "param" in flags:
            kw["params"] = tuple(cfg["param"])
        report = demo_positive(which, opts=_options(cfg), **kw)
        _write_json(out / "positive.json", report.to_dict())
        (out / "positive_trajectory.csv").write_text(report.result.trajectory_csv())
        return EXIT_OK if report.ok else EXIT_NEGATIVE

    lo, hi = _interval(cfg) if cfg.get("interval") else (0.0, 1.0 if name == "sign" else 2.0)
    steps = cfg["steps"]
    if name == "sign":
        kw = {"steps": steps} if steps else {}
        report = demo_sign(hi - lo, x0=lo, y0=float(cfg["y0"]), **kw)
    else:
        if lo != 0.0:
            raise UsageError("demo sin starts at x = 0")
        kw = {"steps": steps} if steps else {}
        report = demo_sin(hi, n0_max=int(cfg["n0_max"]), **kw)
    _write_json(out / f"{name}_report.json", report.to_dict())
    for i, cand in enumerate(report.candidates):
        if cand.trajectory is not None:
            _write_curve(out / f"{name}_candidate_{i:02d}.csv", cand.trajectory, "y")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


COMMANDS = {"solve": cmd_solve, "approx": cmd_approx, "verify": cmd_verify, "demo": cmd_demo}


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        cfg["_explicit"] = set(vars(args))
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[cfg["command"]](cfg, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"carasolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CarasolveError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
