"""Command line entry point ``splitstab``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .experiments import PRESETS, ScenarioConfigError, catalog, load_config, preset, run_scenario
from .experiments.artifacts import default_out_root, write_csv
from .fluxes import FluxDomainError
from .operators import OperatorError, build_operator

EXIT_OK = 0
EXIT_CRASH = 1
EXIT_CONFIG = 2


def _run_one(job: tuple) -> tuple[str, int, str]:
    kind, ref, out, seed = job
    try:
        cfg = preset(ref) if kind == "scenario" else load_config(ref)
        target, result = run_scenario(cfg, out, seed)
    except ScenarioConfigError as exc:
        return str(ref), EXIT_CONFIG, str(exc)
    except FluxDomainError as exc:
        # raised outside the fixed-step integrators, which turn it into a crash record
        return str(ref), EXIT_CRASH, f"solver crashed: {exc}"
    except (OperatorError, KeyError, ValueError, OSError) as exc:
        return str(ref), EXIT_CONFIG, f"{type(exc).__name__}: {exc}"
    if result.crash is not None:
        return str(ref), EXIT_CRASH, f"solver crashed at t={result.crash.time:.6g}: {result.crash.reason} ({target})"
    return str(ref), EXIT_OK, str(target)


def cmd_run(args) -> int:
    out = Path(args.out) if args.out else default_out_root()
    jobs = [("scenario", s, out, args.seed) for s in (args.scenario or [])]
    jobs += [("config", c, out, args.seed) for c in (args.config or [])]
    if args.all:
        jobs += [("scenario", s, out, args.seed) for s in catalog()]
    if not jobs:
        print("nothing to run: give --scenario, --config or --all", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    worst = EXIT_OK
    for ref, code, msg in results:
        stream = sys.stdout if code == EXIT_OK else sys.stderr
        print(f"{ref}: {'ok' if code == EXIT_OK else 'FAILED'} {msg}", file=stream)
        worst = max(worst, code)
    return worst


def cmd_list(args) -> int:
    for name in catalog():
        doc = PRESETS[name]
        print(f"{name:24s} {doc['analysis']:20s} {doc.get('description', '')}")
    return EXIT_OK


def cmd_dump_operator(args) -> int:
    try:
        op = build_operator(args.family, args.p, args.n)
    except (OperatorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out) if args.out else default_out_root() / f"operator-{args.family}-p{args.p}-n{op.n_nodes}"
    out.mkdir(parents=True, exist_ok=True)
    n = op.n_nodes
    write_csv(out / "H.csv", {"x": op.nodes, "h": op.h_diag})
    for name, mat in (("D", op.d_mat), ("Q", op.q_mat)):
        write_csv(out / f"{name}.csv", {f"c{j}": mat[:, j] for j in range(n)})
    q = op.q_mat
    report = {
        "family": op.family.value,
        "p": op.p,
        "n": n,
        "sbp_defect": float(np.max(np.abs(q + q.T - op.e_mat))),
        "exactness": [float(np.max(np.abs(op.d_mat @ op.nodes**k - k * op.nodes ** max(k - 1, 0)))) for k in range(0, 3)]
        if not op.periodic
        else None,
    }
    (out / "operator.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="splitstab", description="SBP split-form stability experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenarios and write artifact directories")
    run.add_argument("--scenario", action="append", help="built-in preset name (repeatable)")
    run.add_argument("--config", action="append", help="JSON config file (repeatable)")
    run.add_argument("--all", action="store_true", help="run every preset")
    run.add_argument("--out", help="output root (default $SPLITSTAB_OUT or ./splitstab-out)")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--jobs", type=int, default=1, help="scenarios to run in parallel")
    run.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list built-in presets")
    ls.set_defaults(func=cmd_list)

    dump = sub.add_parser("dump-operator", help="write D, H and Q of an operator as CSV")
    dump.add_argument("--family", required=True, choices=["csbp", "circulant", "lgl"])
    dump.add_argument("--p", type=int, required=True)
    dump.add_argument("--n", type=int)
    dump.add_argument("--out")
    dump.set_defaults(func=cmd_dump_operator)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
