"""Command line interface.

Exit codes: 0 success or path found, 1 not found (or a check failed),
2 input error, 3 resource or layout error.

Options come from flags, then a JSON ``--config`` file, then built-in
defaults, in that order of precedence.  ``PATCOVER_WORKERS`` sets the default
worker count.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import rng as rngmod
from .clustering import ChopParams, SparsifyParams, chop, sparsify
from .cover import (Pattern, cover_once, estimate_coverage, fit_constant, plant_connected,
                    plant_path, trial_budget)
from .errors import InputError, LayoutError, PatcoverError, ResourceError
from .graph import (GrowthBound, check_growth, empirical_growth_constant, generate_grid,
                    generate_perturbed_subgrid)
from .io import format_edge_list, format_embedding, load_graph
from .longpath import solve_long_path

log = logging.getLogger("patcover")

EXIT_OK, EXIT_NOT_FOUND, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
CLAIM_BOUND = Fraction(17, 256)


def _env_workers() -> int:
    raw = os.environ.get("PATCOVER_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"PATCOVER_WORKERS must be an integer, got {raw!r}") from None


def _header(args, **extra) -> list[str]:
    fields = {"version": __version__, "seed": args.seed, "streams": rngmod.LAYOUT}
    fields.update(extra)
    return [f"# patcover {k}={v}" for k, v in fields.items()]


def _emit(args, text: str, suffix: str = "") -> None:
    if getattr(args, "out", None):
        Path(str(args.out) + suffix).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _growth(args) -> GrowthBound:
    return GrowthBound(args.C, args.delta)


def _load(args):
    g, _emb = load_graph(args.graph)
    return g


def _pattern(args, g, k, rep=0):
    if getattr(args, "pattern", None):
        verts = [int(t) for t in args.pattern.replace(",", " ").split()]
        if any(not 0 <= v < g.n for v in verts):
            raise InputError("pattern vertex out of range")
        return verts
    rng = rngmod.stream(args.seed, rep, rngmod.PATTERN, k)
    planter = plant_path if args.plant == "path" else plant_connected
    return sorted(planter(g, k, rng))


# ---- commands -------------------------------------------------------------

def cmd_gen_grid(args):
    g, emb = generate_grid(args.delta, args.side)
    _emit(args, format_edge_list(g))
    if args.out:
        _emit(args, format_embedding(emb), ".emb")
    return EXIT_OK


def cmd_gen_subgrid(args):
    rng = rngmod.stream(args.seed, 0, rngmod.PATTERN)
    g, emb = generate_perturbed_subgrid(args.delta, args.side, args.delete_prob, rng)
    head = _header(args, delete_prob=args.delete_prob)
    _emit(args, "\n".join(head) + "\n" + format_edge_list(g))
    if args.out:
        _emit(args, format_embedding(emb), ".emb")
    return EXIT_OK


def cmd_verify_growth(args):
    g = _load(args)
    bad = check_growth(g, _growth(args))
    report = {"vertices": g.n, "edges": g.m, "C": args.C, "delta": args.delta,
              "violations": len(bad), "first_violations": [list(b) for b in bad[:10]],
              "empirical_C": empirical_growth_constant(g, args.delta)}
    _emit(args, _json(report))
    return EXIT_OK if not bad else EXIT_NOT_FOUND


def _warn_small_k(k):
    if k < 4:
        log.warning("k=%d < 4: covering needs k >= 4; the whole graph is returned for direct search", k)
        return True
    return False


def cmd_chop(args):
    g = _load(args)
    if _warn_small_k(args.k):
        _emit(args, _json({"trivial": True, "retained": list(range(g.n))}))
        return EXIT_OK
    params = ChopParams.from_growth(args.k, _growth(args), args.cap_R, args.center_rule)
    out = chop(g, params, rngmod.stream(args.seed, args.trial, rngmod.CHOP))
    doc = {"meta": _meta(args), "cap_R": params.cap_R, **out.to_dict()}
    _emit(args, _json(doc))
    return EXIT_OK


def cmd_sparsify(args):
    g = _load(args)
    if _warn_small_k(args.k):
        _emit(args, _json({"trivial": True, "retained": list(range(g.n))}))
        return EXIT_OK
    component = range(g.n) if not args.vertices else [int(t) for t in args.vertices.replace(",", " ").split()]
    component = sorted(set(component))
    params = SparsifyParams.for_component(args.k, args.delta, len(component), args.cap_Rprime,
                                          args.center_rule)
    out = sparsify(g, component, params, rngmod.stream(args.seed, args.trial, rngmod.SPARSIFY, 0))
    doc = {"meta": _meta(args), "params": {"cap_Rprime": params.cap_Rprime, "p2": params.p2,
                                           "portal_budget": params.portal_budget,
                                           "empty_guess_prob": params.empty_guess_prob},
           **out.to_dict()}
    _emit(args, _json(doc))
    return EXIT_OK


def cmd_cover(args):
    g = _load(args)
    if _warn_small_k(args.k):
        _emit(args, _json({"trivial": True, "retained": list(range(g.n))}))
        return EXIT_OK
    res = cover_once(g, args.k, _growth(args), args.seed, args.trial, args.cap_R, args.cap_Rprime,
                     args.center_rule)
    problems = res.forest.violations(g)
    doc = {"meta": _meta(args), "depth": res.forest.depth, "depth_bound": res.depth_bound(),
           "forest_valid": not problems, **res.to_dict()}
    _emit(args, _json(doc))
    return EXIT_OK


def _meta(args):
    return {"version": __version__, "seed": args.seed, "streams": rngmod.LAYOUT,
            "trial": getattr(args, "trial", None)}


def cmd_estimate(args):
    g = _load(args)
    ks = _int_list(args.k)
    rows = ["k,phase,method,trials,p_hat,stderr,pattern"]
    for k in ks:
        x = _pattern(args, g, k)
        p, se = estimate_coverage(g, Pattern(frozenset(x), k), _growth(args), args.trials, args.seed,
                                  args.phase, args.method, args.workers, **_cover_opts(args))
        rows.append(f"{k},{args.phase},{args.method},{args.trials},{p:.10g},{se:.10g},{' '.join(map(str, x))}")
    extra = {"claim_bound": f"{CLAIM_BOUND}={float(CLAIM_BOUND):.6f}"} if args.phase == "chop" else {}
    _emit(args, "\n".join(_header(args, **extra) + rows) + "\n")
    return EXIT_OK


def cmd_fit_constant(args):
    g = _load(args)
    ks = _int_list(args.k)
    ps, rows = [], ["k,x,p_hat,stderr,neg_log2_p"]
    ses = []
    for k in ks:
        # average over several planted patterns; one pattern alone is very noisy
        vals = []
        for rep in range(1 if args.pattern else args.patterns):
            x = _pattern(args, g, k, rep)
            vals.append(estimate_coverage(g, Pattern(frozenset(x), k), _growth(args), args.trials,
                                          args.seed, "cover", args.method, args.workers,
                                          **_cover_opts(args)))
        ps.append(sum(p for p, _ in vals) / len(vals))
        ses.append(sum(se * se for _, se in vals) ** 0.5 / len(vals))
    fit = fit_constant(ks, ps, args.delta)
    for k, xv, p, se, y in zip(ks, fit.x, ps, ses, fit.y):
        rows.append(f"{k},{xv:.10g},{p:.10g},{se:.10g},{y:.10g}")
    head = _header(args, c_hat=f"{fit.c_hat:.10g}", intercept=f"{fit.intercept:.10g}",
                   r_squared=f"{fit.r_squared:.10g}")
    _emit(args, "\n".join(head + rows) + "\n")
    return EXIT_OK


def cmd_solve(args):
    g = _load(args)
    trials = args.trials
    if trials is None:
        if args.c_hat is None:
            raise InputError("give --trials or --c-hat")
        trials = trial_budget(args.k, args.delta, args.c_hat, args.failure_prob)
    path = solve_long_path(g, args.k, _growth(args), trials, args.seed, **_cover_opts(args))
    if path is None:
        _emit(args, "\n".join(_header(args, trials=trials)) + "\nnot found\n")
        return EXIT_NOT_FOUND
    _emit(args, "\n".join(_header(args, trials=trials)) + "\n" + " ".join(map(str, path)) + "\n")
    return EXIT_OK


def cmd_reduce(args):
    from .hardness import (brute_force_csp, construct_witness_path, parse_csp, reduce_csp,
                           validate_ham_path)
    csp = parse_csp(Path(args.csp).read_text())
    red = reduce_csp(csp, args.spacing)
    summary = red.summary()
    if args.witness:
        sol = brute_force_csp(csp)
        if sol is None:
            summary["witness"] = "unsatisfiable"
        else:
            path = construct_witness_path(red, sol)
            problems = validate_ham_path(red.graph, path)
            summary["witness"] = "valid" if not problems else problems[:5]
            if args.out:
                Path(str(args.out) + ".path").write_text(" ".join(map(str, path)) + "\n")
    if args.out:
        _emit(args, format_edge_list(red.graph))
        _emit(args, format_embedding(red.embedding), ".emb")
        _emit(args, _json(summary), ".json")
    else:
        sys.stdout.write(_json(summary))
    return EXIT_OK


def cmd_verify_gadgets(args):
    from .hardness.claims import verify_gadgets
    results = verify_gadgets(range(2, args.max_lambda + 1))
    # timings vary run to run, so they stay out of the byte-stable output
    lines = [r.line().rsplit(" (", 1)[0] for r in results]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_NOT_FOUND


# ---- parser ---------------------------------------------------------------

def _int_list(text) -> list[int]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise InputError("empty k list")
    return out


def _cover_opts(args):
    return {"cap_R": args.cap_R, "cap_Rprime": args.cap_Rprime, "center_rule": args.center_rule}


def _common(p, randomized=True, growth=True, graph=True):
    if graph:
        p.add_argument("graph", help="edge-list file (embedding sidecar <graph>.emb optional)")
    if growth:
        p.add_argument("--delta", type=int, default=2)
        p.add_argument("--C", type=float, default=4.0, help="growth constant")
    if randomized:
        p.add_argument("--seed", type=int, default=rngmod.DEFAULT_SEED)
    p.add_argument("--out", help="output path (default: stdout)")


def _covering(p):
    p.add_argument("--cap-R", dest="cap_R", type=int, help="override the chop radius cap")
    p.add_argument("--cap-Rprime", dest="cap_Rprime", type=int, help="override the sparsify radius cap")
    p.add_argument("--center-rule", choices=("lowest", "random"), default="lowest")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="patcover", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"patcover {__version__}")
    ap.add_argument("--config", help="JSON file with option defaults")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-grid", help="full grid [0, side)^delta")
    p.add_argument("--delta", type=int, default=2)
    p.add_argument("--side", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_grid)

    p = sub.add_parser("gen-subgrid", help="grid with random vertex deletions")
    p.add_argument("--delta", type=int, default=2)
    p.add_argument("--side", type=int, required=True)
    p.add_argument("--delete-prob", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=rngmod.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_subgrid)

    p = sub.add_parser("verify-growth", help="check |B(v,r)| <= C r^delta everywhere")
    _common(p, randomized=False)
    p.set_defaults(func=cmd_verify_growth)

    for name, func, extra in (("chop", cmd_chop, "cap_R"), ("sparsify", cmd_sparsify, "cap_Rprime"),
                              ("cover", cmd_cover, None)):
        p = sub.add_parser(name)
        _common(p)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--trial", type=int, default=0)
        _covering(p)
        if name == "sparsify":
            p.add_argument("--vertices", help="component to sparsify (default: all vertices)")
        p.set_defaults(func=func)

    for name, func in (("estimate", cmd_estimate), ("fit-constant", cmd_fit_constant)):
        p = sub.add_parser(name)
        _common(p)
        p.add_argument("--k", default="4..12" if name == "fit-constant" else None,
                       required=name == "estimate", help="k values, e.g. 4,6,8 or 4..12")
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--method", choices=("indicator", "conditional"),
                       default="conditional" if name == "fit-constant" else "indicator")
        if name == "estimate":
            p.add_argument("--phase", choices=("chop", "cover"), default="cover")
        p.add_argument("--pattern", help="explicit pattern vertices (default: planted)")
        p.add_argument("--plant", choices=("path", "connected"), default="path")
        if name == "fit-constant":
            p.add_argument("--patterns", type=int, default=8, help="planted patterns per k")
        p.add_argument("--workers", type=int, default=None)
        _covering(p)
        p.set_defaults(func=func)

    p = sub.add_parser("solve-longpath", help="find a k-vertex path")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--c-hat", dest="c_hat", type=float)
    p.add_argument("--failure-prob", type=float, default=1e-3)
    _covering(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reduce", help="CSP instance to Hamiltonian path instance")
    p.add_argument("csp")
    p.add_argument("--spacing", type=int, help="block side (default 16 * delta * lambda^2)")
    p.add_argument("--witness", action="store_true",
                   help="solve the CSP by brute force and build the Hamiltonian path")
    p.add_argument("--out", help="output prefix for .emb/.json/.path files")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify-gadgets", help="exhaustive checks of the gadget properties")
    p.add_argument("--max-lambda", type=int, default=6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_gadgets)
    return ap


def _apply_config(ap, argv):
    """Re-parse with config file values as defaults, so flags still win."""
    # a config may supply required options, so only --config is looked at first
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    subparsers = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    command = next((t for t in rest if t in subparsers.choices), None)
    if not known.config or command is None:
        return ap.parse_args(argv)
    try:
        config = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(config, dict):
        raise InputError("config file must hold a JSON object")
    config = {k.replace("-", "_"): v for k, v in config.items()}
    sp = subparsers.choices[command]
    known_keys = {a.dest for a in sp._actions}
    unknown = sorted(set(config) - known_keys)
    if unknown:
        raise InputError(f"unknown config keys for {command}: {unknown}")
    for action in sp._actions:
        if action.dest in config:
            action.required = False
    sp.set_defaults(**config)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s")
        if getattr(args, "workers", 0) is None:
            args.workers = _env_workers()
        for name in ("k", "trials", "trial"):
            value = getattr(args, name, None)
            if isinstance(value, int) and value < 0:
                raise InputError(f"--{name} must be non-negative")
        return args.func(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except LayoutError as exc:
        print(f"layout error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PatcoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
