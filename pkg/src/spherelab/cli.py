"""Command-line entry point: ``spherelab <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, constructions, k21, search, solvers, topology
from .complex_core import FacetHypergraph, HypergraphError, epsilon, f_vector, load

FAMILIES = ("simplex", "cross", "cyclic", "icosahedron", "stacked-ball", "stacked-sphere",
            "cd-plus", "x", "y", "k21", "n21")


class UsageError(Exception):
    pass


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for family {args.family}")


def build_family(args) -> FacetHypergraph:
    fam = args.family
    if fam == "simplex":
        _need(args, "d")
        return constructions.simplex_boundary(args.d)
    if fam == "cross":
        _need(args, "d")
        return constructions.cross_polytope_boundary(args.d)[0]
    if fam == "cyclic":
        _need(args, "d", "n")
        return constructions.cyclic_polytope(args.d, args.n)
    if fam == "icosahedron":
        return constructions.icosahedron_boundary()
    if fam == "stacked-ball":
        _need(args, "d", "n")
        ball = constructions.stacked_ball_path(args.d, args.n)
        return FacetHypergraph(args.n, ball.facets)
    if fam == "stacked-sphere":
        _need(args, "d", "n")
        return constructions.ball_boundary(constructions.stacked_ball_path(args.d + 1, args.n))
    if fam == "cd-plus":
        _need(args, "d")
        return constructions.cd_plus(args.d)[0]
    if fam == "x":
        _need(args, "d", "k")
        return constructions.x_construction(args.d, args.k)[0]
    if fam == "y":
        _need(args, "k")
        return constructions.y_construction(args.k)[0]
    if fam == "k21":
        return k21.build_k21()
    if fam == "n21":
        return k21.n21()
    raise UsageError(f"unknown family {fam}")


def parse_start(spec: str) -> FacetHypergraph:
    parts = spec.split(":")
    if parts[0] == "cyclic" and len(parts) == 3:
        return constructions.cyclic_polytope(int(parts[1]), int(parts[2]))
    if os.path.exists(spec):
        return load(spec)
    raise UsageError(f"--start must be cyclic:<d>:<n> or a facet file, got {spec!r}")


def _budget(args) -> solvers.Budget:
    return solvers.Budget(ms=args.budget_ms)


def _emit_complex(K: FacetHypergraph, fmt: str) -> str:
    return K.to_json() + "\n" if fmt == "json" else K.to_text()


class Run:
    """Collects what goes into the run manifest."""

    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.start = time.perf_counter()

    def read(self, path) -> FacetHypergraph:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return load(path)

    def write(self, path, text: str):
        Path(path).write_text(text)
        self.outputs[str(path)] = hashlib.sha256(text.encode()).hexdigest()

    def manifest(self, status: int) -> dict:
        return {
            "command": ["spherelab"] + self.argv,
            "seed": self.args.seed,
            "budget_ms": self.args.budget_ms,
            "threads": self.args.threads,
            "versions": {"spherelab": __version__, "python": platform.python_version(),
                         "numpy": np.__version__},
            "inputs": self.inputs,
            "outputs": self.outputs,
            "exit_code": status,
            "wall_time_s": round(time.perf_counter() - self.start, 6),
        }


def cmd_construct(run: Run, args) -> int:
    K = build_family(args)
    text = _emit_complex(K, args.format)
    if args.out:
        run.write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cert_json(cert: solvers.SolverCertificate) -> dict:
    d = cert.to_dict()
    d["elapsed"] = round(d["elapsed"], 6)
    return d


def cmd_compute(run: Run, args) -> int:
    K = run.read(args.input)
    budget = _budget(args)
    what = args.what
    if what == "tau":
        out = _cert_json(solvers.transversal_number(K, budget))
    elif what == "alpha":
        out = _cert_json(solvers.independence_number(K, budget))
    elif what == "chi":
        out = _cert_json(solvers.chromatic_number(K, budget))
    elif what == "greedy-chi":
        out = _cert_json(solvers.greedy_chromatic(K, budget))
    elif what == "two-col":
        coloring = solvers.two_colorable(K, budget)
        out = {"kind": "coloring", "two_colorable": coloring is not None,
               "witness": None if coloring is None else [coloring[v] for v in range(K.n)]}
    elif what == "eps":
        out = {"epsilon": epsilon(K), "n": K.n}
    elif what == "fvector":
        out = {"f_vector": list(f_vector(K).counts)}
    elif what == "alteration":
        params = solvers.AlterationParams(d=K.dim, c=args.c, k=args.density_k, seed=args.seed)
        S = solvers.random_independent_set(K, params)
        out = {"independent_set": list(S), "size": len(S),
               "bound": solvers.alteration_bound(K.n, K.dim, args.c, args.density_k)}
    else:
        raise UsageError(f"unknown quantity {what}")
    print(json.dumps(out, sort_keys=True))
    return 0


def run_checks(K: FacetHypergraph, names: list[str]) -> dict:
    out = {}
    for name in names:
        if name == "manifold3":
            out[name] = topology.manifold_check_3d(K)
        elif name == "homology":
            h = topology.homology(K)
            out[name] = h.is_sphere(K.dim)
            out["homology_profile"] = h.to_dict()
        elif name.startswith("neighborly"):
            _, _, k = name.partition(":")
            out[name] = topology.is_k_neighborly(K, int(k or 2))
        elif name == "dehn-sommerville":
            out[name] = topology.neighborly3_face_check(K)
        elif name == "pseudomanifold":
            out[name] = topology.is_pseudomanifold(K, K.dim)
        elif name == "connected":
            out[name] = topology.is_connected(K)
        elif name == "sphere":
            out[name] = all(topology.check_complex(K).values())
        else:
            raise UsageError(f"unknown check {name}")
    return out


def cmd_verify(run: Run, args) -> int:
    K = run.read(args.input)
    names = [c for c in args.checks.split(",") if c]
    results = run_checks(K, names)
    passed = all(results[c] for c in names)
    report = {"passed": passed, "checks": results,
              "note": "sphere checks certify homology manifolds only"}
    print(json.dumps(report, sort_keys=True))
    return 0 if passed else 1


def cmd_verify_k21(run: Run, args) -> int:
    report = k21.verify_k21(_budget(args), workers=args.threads)
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.emit:
        out = Path(args.emit)
        out.mkdir(parents=True, exist_ok=True)
        run.write(out / "K_21.facets", k21.build_k21().to_text())
        run.write(out / "N_21.facets", k21.n21().to_text())
        run.write(out / "report.json", text + "\n")
    print(text)
    return 0 if report["passed"] else 1


def cmd_search(run: Run, args) -> int:
    start = parse_start(args.start)
    screens = [s for s in args.screen.split(",") if s]
    for s in screens:
        if s not in ("tau", "2col"):
            raise UsageError(f"unknown screen {s}")
    cfg = search.SearchConfig(start=start, target_n=args.target_n, samples_per_step=args.samples,
                              beam_width=args.beam, seed=args.seed, budget_ms=args.budget_ms,
                              workers=args.threads,
                              screen_stages=(args.target_n,) if screens else ())
    result = search.extension_search(cfg)
    log = result.to_dict()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for K in result.winners:
            run.write(out / f"stage_{K.n:02d}.facets", K.to_text())
        run.write(out / "search_log.json", json.dumps(log, sort_keys=True, indent=2) + "\n")
    print(json.dumps(log, sort_keys=True))
    return 0


def cmd_iso(run: Run, args) -> int:
    A, B = run.read(args.a), run.read(args.b)
    phi = solvers.isomorphic(A, B)
    out = {"isomorphic": phi is not None,
           "bijection": None if phi is None else [phi[v] for v in range(A.n)]}
    print(json.dumps(out, sort_keys=True))
    return 0 if phi is not None else 1


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-ms", type=float, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--manifest", default=None, help="where to write the run manifest")

    p = argparse.ArgumentParser(prog="spherelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="emit a constructed complex")
    c.add_argument("--family", required=True, choices=FAMILIES)
    c.add_argument("--d", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("compute", parents=[common], help="solver quantities as JSON")
    c.add_argument("--what", required=True,
                   choices=("tau", "alpha", "chi", "greedy-chi", "two-col", "eps", "fvector", "alteration"))
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--c", type=float, default=4.0, help="density constant (alteration)")
    c.add_argument("--density-k", type=float, default=2.0, help="density exponent (alteration)")
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("verify", parents=[common], help="topology checks on a facet file")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--checks", default="sphere")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("verify-k21", parents=[common], help="replay and verify the 21-vertex sphere")
    c.add_argument("--emit")
    c.set_defaults(func=cmd_verify_k21)

    c = sub.add_parser("search", parents=[common], help="epsilon-minimising extension search")
    c.add_argument("--start", default="cyclic:4:7")
    c.add_argument("--target-n", type=int, required=True)
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--beam", type=int, default=1)
    c.add_argument("--screen", default="")
    c.add_argument("--out")
    c.set_defaults(func=cmd_search)

    c = sub.add_parser("iso", parents=[common], help="hypergraph isomorphism test")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.set_defaults(func=cmd_iso)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(argv, args)
    try:
        status = args.func(run, args)
    except (UsageError, HypergraphError, ValueError, OSError) as exc:
        print(f"spherelab: error: {exc}", file=sys.stderr)
        status = 2
    manifest = json.dumps(run.manifest(status), sort_keys=True, indent=2) + "\n"
    target = args.manifest
    if target is None:
        out_dir = getattr(args, "emit", None) or (getattr(args, "out", None) if args.command == "search" else None)
        if out_dir:
            target = str(Path(out_dir) / "manifest.json")
    if target:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(manifest)
    else:
        sys.stderr.write(manifest)
    return status


if __name__ == "__main__":
    sys.exit(main())
