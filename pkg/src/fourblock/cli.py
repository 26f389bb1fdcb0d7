"""Command-line entry point.  All numbers are printed as exact strings."""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

from . import acceptance, graver
from .arrangement import Hyperplane, enumerate_faces
from .decomposition import build_scheme, decompose, decomposition_order
from .errors import FourBlockError
from .exactmath import format_rational
from .instance import GenParams, check_solution, parse_instance, random_instance, serialize_instance
from .oracle import brute_force_solve
from .solver import SolveOptions, lift_hyperplanes, solve

EXIT = {"OPTIMAL": 0, "INFEASIBLE": 2, "UNBOUNDED": 3}


@dataclass
class RunConfig:
    command: str
    input: str = None
    seed: int = 0
    box: int = None
    threads: int = 1
    face_cap: int = 200000
    node_cap: int = 100000
    format: str = "json"

    def __post_init__(self):
        if self.threads < 1 or self.face_cap < 1 or self.node_cap < 1:
            raise ValueError("budgets and thread count must be positive")


def _vec(v):
    return [format_rational(x) for x in v]


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(doc, fmt):
    if fmt == "json":
        print(json.dumps(doc, sort_keys=True))
    else:
        for k, v in doc.items():
            print(f"{k}: {v}")


def _stats_doc(stats, timing):
    out = {}
    for k, v in sorted(stats.items()):
        if k == "wall_time":
            if timing:
                out[k] = f"{v:.6f}"
            continue
        out[k] = v if isinstance(v, (str, bool)) else format_rational(v) if isinstance(v, int) else str(v)
    return out


def _solution_doc(sol):
    return {"objective": format_rational(sol.objective), "x0": _vec(sol.x0),
            "x": [_vec(x) for x in sol.x_bricks]}


def cmd_solve(args, cfg):
    inst = parse_instance(_read(cfg.input))
    opts = SolveOptions(face_cap=cfg.face_cap, node_cap=cfg.node_cap, threads=cfg.threads,
                        domain_box=not args.no_box_presolve)
    status = solve(inst, opts)
    doc = {"status": status.status, "stats": _stats_doc(status.stats, not args.no_timing)}
    if status.solution is not None:
        doc.update(_solution_doc(status.solution))
    if args.verify:
        if status.solution is not None:
            ok, report = check_solution(inst, status.solution)
            doc["verified"] = ok if ok else report
        if cfg.box is not None:
            ref = brute_force_solve(inst, cfg.box)
            doc["oracle_status"] = ref.status
            doc["oracle_agrees"] = ref.status == status.status and ref.value == status.objective
    _emit(doc, cfg.format)
    if args.verify and doc.get("oracle_agrees") is False:
        return 1
    return EXIT[status.status]


def cmd_oracle(args, cfg):
    inst = parse_instance(_read(cfg.input))
    if cfg.box is None:
        raise SystemExit("oracle needs --box")
    rep = brute_force_solve(inst, cfg.box)
    doc = {"status": rep.status, "counts": rep.counts}
    if rep.witness is not None:
        doc.update(_solution_doc(rep.witness))
    _emit(doc, cfg.format)
    return EXIT[rep.status]


def cmd_gen(args, cfg):
    params = GenParams(s=args.s, t=args.t, d=args.d, m=args.m, n=args.n, delta=args.delta,
                       delta_bar=args.delta_bar, rhs_bound=args.rhs_bound,
                       box_bound=args.box_bound, uniform_b=not args.non_uniform,
                       planted=args.planted)
    print(serialize_instance(random_instance(params, cfg.seed)))
    return 0


def _ints(text):
    return tuple(int(x) for x in text.replace(" ", "").split(",") if x)


def _matrix(text):
    return tuple(_ints(row) for row in text.split(";"))


def cmd_decompose(args, cfg):
    scheme = build_scheme(args.d, args.delta, args.tdec, args.modulus)
    b = _ints(args.b)
    if len(b) != args.d:
        raise SystemExit(f"--b needs {args.d} entries")
    amap, mult = decompose(scheme, b)
    names = ["q"] + [f"w{i + 1}" for i in range(len(amap.support) - 1)]
    doc = {
        "psi": format_rational(scheme.psi), "phi": format_rational(scheme.phi),
        "modulus": format_rational(scheme.M), "t_dec": format_rational(scheme.t_dec),
        "hyperplanes": len(scheme.hyperplanes), "residue": _vec(amap.r),
        "generators": [_vec(v) for v in amap.V],
        "S": list(amap.S), "alpha": _vec(amap.alpha),
        "gamma": [None if g is None else format_rational(g) for g in amap.gamma],
        "support": {n: _vec(v) for n, v in zip(names, amap.support)},
        "q": _vec(amap.q),
        "multiplicities": {n: format_rational(m) for n, m in zip(names, mult)},
        "order": format_rational(decomposition_order(amap)),
    }
    _emit(doc, cfg.format)
    return 0


def _parse_planes(text):
    planes = []
    for part in text.split(";"):
        a, beta = part.split(":")
        planes.append(Hyperplane(_ints(a), int(beta)))
    return planes


def cmd_arrange(args, cfg):
    if args.planes:
        H = _parse_planes(args.planes)
        dim = len(H[0].a)
    else:
        inst = parse_instance(_read(cfg.input))
        scheme = build_scheme(max(inst.d, 1), max(inst.delta, 1))
        H = lift_hyperplanes(inst, scheme).hyperplanes
        dim = inst.s
    arr = enumerate_faces(H, dim, face_cap=cfg.face_cap)
    doc = {"dimension": dim, "hyperplanes": len(H), "faces": len(arr.faces),
           "witnesses": [{"position": "".join(str(p) for p in pv), "point": _vec(w)}
                         for pv, w in arr.faces]}
    _emit(doc, cfg.format)
    return 0


def cmd_graver(args, cfg):
    D = _matrix(args.D)
    doc = {"graver": [_vec(g) for g in graver.graver_basis(D).elements],
           "nonnegative": [_vec(g) for g in graver.nonneg_graver(D)]}
    if args.rhs:
        doc["base_solutions"] = [_vec(x) for x in graver.base_solutions(D, _ints(args.rhs)).solutions]
    _emit(doc, cfg.format)
    return 0


def cmd_selftest(args, cfg):
    selected = set(_ints(args.only)) if args.only else None
    results = acceptance.run_all(selected)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def cmd_bench(args, cfg):
    rows = acceptance.bench_rows(_ints(args.ns))
    if cfg.format == "json":
        for r in rows:
            r["objective"] = format_rational(r["objective"])
            r["wall_time"] = f"{r['wall_time']:.6f}"
        print(json.dumps(rows, sort_keys=True))
    else:
        print(f"{'n':>4} {'|H|':>5} {'faces':>6} {'guesses':>8} {'solved':>7} {'nodes':>7} {'seconds':>8}")
        for r in rows:
            print(f"{r['n']:>4} {r['lifted_hyperplanes']:>5} {r['faces']:>6} {r['guesses']:>8} "
                  f"{r['guesses_solved']:>7} {r['milp_nodes']:>7} {r['wall_time']:>8.2f}")
    return 0


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for INFEASIBLE."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--input", help="instance JSON file ('-' for stdin)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--box", type=int, help="per-variable bound for the brute-force oracle")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--face-cap", type=int, default=200000)
    common.add_argument("--node-cap", type=int, default=100000)
    common.add_argument("--format", choices=["json", "text"], default="json")

    p = _Parser(prog="fourblock", description="Exact solver for 4-block integer programs")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", parents=[common], help="solve an instance")
    sp.add_argument("--verify", action="store_true", help="re-check the solution (and compare with the oracle when --box is given)")
    sp.add_argument("--no-timing", action="store_true", help="omit wall-clock fields for byte-stable output")
    sp.add_argument("--no-box-presolve", action="store_true", help="enumerate every residue and face")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("oracle", parents=[common], help="brute-force an instance")
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("gen", parents=[common], help="print a random instance")
    for name, default in (("s", 1), ("t", 2), ("d", 1), ("m", 1), ("n", 3), ("delta", 1),
                          ("delta-bar", 1), ("rhs-bound", 6), ("box-bound", 20)):
        sp.add_argument(f"--{name}", type=int, default=default)
    sp.add_argument("--planted", type=float, default=0.5)
    sp.add_argument("--non-uniform", action="store_true")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("decompose", parents=[common], help="decompose a right-hand side")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--delta", type=int, default=1)
    sp.add_argument("--tdec", type=int)
    sp.add_argument("--modulus", type=int)
    sp.add_argument("--b", required=True, help="comma separated vector")
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("arrange", parents=[common], help="enumerate arrangement faces")
    sp.add_argument("--planes", help="hyperplanes as 'a1,a2:beta;...'")
    sp.set_defaults(fn=cmd_arrange)

    sp = sub.add_parser("graver", parents=[common], help="Graver basis of a small matrix")
    sp.add_argument("--D", required=True, help="rows separated by ';', entries by ','")
    sp.add_argument("--rhs", help="also list base solutions for this right-hand side")
    sp.set_defaults(fn=cmd_graver)

    sp = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    sp.add_argument("--only", help="comma separated criterion numbers")
    sp.set_defaults(fn=cmd_selftest)

    sp = sub.add_parser("bench", parents=[common], help="guess counts and runtime against n")
    sp.add_argument("--ns", default="2,4,8,16")
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None):
    level = os.environ.get("FOURBLOCK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.input, args.seed, args.box, args.threads,
                        args.face_cap, args.node_cap, args.format)
        return args.fn(args, cfg)
    except (FourBlockError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
