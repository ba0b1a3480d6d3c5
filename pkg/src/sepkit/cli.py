"""Command-line surface.

Subcommand tree: graph (stats, echo), separate (prs, expansion-schedule,
oracle, verify), minor (contract, nabla-exact, nabla-greedy, clique),
tw (exact, from-separators, to-separator), family (generate), bounds
(table, solve-a), experiment (separator-scaling, expansion-scaling,
bound-table).

Exit codes: 0 success, 1 usage error, 2 validation/certificate failure,
3 size-limit refusal.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import experiments
from .bounds import BoundParams, eval_b, eval_f, eval_p, solve_a
from .errors import (
    CertificationError,
    GraphParseError,
    SizeLimitError,
    ValidationError,
)
from .families import generate_family, parse_family_spec
from .graphs import Graph, components, read_graph, write_graph
from .minors import (
    BranchModel,
    contract_model,
    greedy_shallow_clique,
    nabla_exact,
    nabla_greedy,
)
from .separators import (
    Separator,
    engine_balanced_separator,
    optimal_balanced_separator,
    prs_dichotomy,
    separator_from_expansion,
    verify_cb_separators,
)
from .treewidth import (
    TreeDecomposition,
    decomposition_from_separators,
    exact_treewidth,
    separator_from_decomposition,
    validate_decomposition,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SIZE_LIMIT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_graph(path: str) -> Graph:
    if path == "-":
        return read_graph(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return read_graph(fh.read())


def _load_model(path: str, g: Graph) -> BranchModel:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return BranchModel(
        g,
        int(data["depth"]),
        tuple(frozenset(s) for s in data["sets"]),
        tuple(data["centers"]),
    )


def _load_td(path: str) -> TreeDecomposition:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return TreeDecomposition(
        tuple(frozenset(b) for b in data["bags"]),
        tuple((int(i), int(j)) for i, j in data["tree"]),
    )


def _emit(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def build_parser() -> _Parser:
    p = _Parser(prog="sepkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("graph", help="edge-list I/O and stats")
    gsub = g.add_subparsers(dest="sub", required=True)
    gs = gsub.add_parser("stats")
    gs.add_argument("file")
    ge = gsub.add_parser("echo", help="re-emit in canonical form")
    ge.add_argument("file")

    s = sub.add_parser("separate", help="balanced separators")
    ssub = s.add_subparsers(dest="sub", required=True)
    sp = ssub.add_parser("prs")
    sp.add_argument("file")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--budget-const", type=float, default=8.0)
    sp.add_argument("--seed", type=int, default=0)
    se = ssub.add_parser("expansion-schedule")
    se.add_argument("file")
    se.add_argument("--k", type=float, required=True)
    se.add_argument("--d", type=float, required=True)
    se.add_argument("--c-out", type=float, default=8.0)
    se.add_argument("--budget-const", type=float, default=8.0)
    se.add_argument("--seed", type=int, default=0)
    so = ssub.add_parser("oracle")
    so.add_argument("file")
    sv = ssub.add_parser("verify")
    sv.add_argument("file")
    sv.add_argument("--c", type=float, required=True)
    sv.add_argument("--beta", type=float, required=True)
    sv.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    sv.add_argument("--seed", type=int, default=0)
    sv.add_argument("--samples", type=int, default=48)

    m = sub.add_parser("minor", help="depth-bounded minors")
    msub = m.add_subparsers(dest="sub", required=True)
    mc = msub.add_parser("contract")
    mc.add_argument("file")
    mc.add_argument("--model", required=True, help="branch model JSON file")
    mne = msub.add_parser("nabla-exact")
    mne.add_argument("file")
    mne.add_argument("-r", type=int, required=True)
    mng = msub.add_parser("nabla-greedy")
    mng.add_argument("file")
    mng.add_argument("-r", type=int, required=True)
    mng.add_argument("--seed", type=int, default=0)
    mng.add_argument("--restarts", type=int, default=200)
    mcl = msub.add_parser("clique")
    mcl.add_argument("file")
    mcl.add_argument("-t", type=int, required=True)
    mcl.add_argument("--depth", type=int, required=True)
    mcl.add_argument("--seed", type=int, default=0)

    t = sub.add_parser("tw", help="tree decompositions")
    tsub = t.add_subparsers(dest="sub", required=True)
    te = tsub.add_parser("exact")
    te.add_argument("file")
    tf = tsub.add_parser("from-separators")
    tf.add_argument("file")
    tf.add_argument("--provider", choices=("oracle", "engine"), default="engine")
    tf.add_argument("--k-hint", type=float, default=1.0)
    tt = tsub.add_parser("to-separator")
    tt.add_argument("file")
    tt.add_argument("--td", required=True, help="tree decomposition JSON file")

    f = sub.add_parser("family", help="instance generators")
    fsub = f.add_subparsers(dest="sub", required=True)
    fg = fsub.add_parser("generate")
    fg.add_argument("spec", help="e.g. c-delta:n=10,delta=0.5,seed=1")
    fg.add_argument("-o", "--output", default="-")

    b = sub.add_parser("bounds", help="bound functions")
    bsub = b.add_subparsers(dest="sub", required=True)
    ba = bsub.add_parser("solve-a")
    ba.add_argument("--delta", type=float, required=True)
    ba.add_argument("--c", type=float, required=True)
    ba.add_argument("--tol", type=float, default=1e-9)
    bt = bsub.add_parser("table")
    bt.add_argument("--c", type=float, nargs="+", default=[1.0])
    bt.add_argument("--delta", type=float, nargs="+", default=[1.0])
    bt.add_argument("--r", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    bt.add_argument("--n0", type=int, default=14)
    bt.add_argument("--format", choices=("json", "csv"), default="json")

    e = sub.add_parser("experiment", help="reproducible scaling studies")
    esub = e.add_subparsers(dest="sub", required=True)
    for name in ("separator-scaling", "expansion-scaling", "bound-table"):
        ep = esub.add_parser(name)
        ep.add_argument("--config", required=True)
        ep.add_argument("--out-dir", default=None)
        ep.add_argument("--seed", type=int, default=None)

    return p


def _cmd_graph(args) -> int:
    g = _load_graph(args.file)
    if args.sub == "stats":
        degs = [g.degree(v) for v in range(g.n)] or [0]
        _emit(
            {
                "n": g.n,
                "m": g.m,
                "density": g.m / g.n if g.n else 0.0,
                "components": len(components(g)),
                "min_degree": min(degs),
                "max_degree": max(degs),
            }
        )
    else:
        sys.stdout.write(write_graph(g))
    return EXIT_OK


def _cmd_separate(args) -> int:
    g = _load_graph(args.file)
    if args.sub == "prs":
        res = prs_dichotomy(g, args.l, args.h, budget_const=args.budget_const, seed=args.seed)
        if res.arm == "separator":
            _emit({"arm": "separator", "budget": res.budget, "separator": res.separator.to_json_dict(g.n)})
        else:
            _emit({"arm": "minor", "depth": res.depth, "model": res.minor_witness.to_json_dict()})
    elif args.sub == "expansion-schedule":
        sep = separator_from_expansion(g, args.k, args.d, args.c_out, budget_const=args.budget_const, seed=args.seed)
        _emit(sep.to_json_dict(g.n))
    elif args.sub == "oracle":
        _emit(optimal_balanced_separator(g).to_json_dict(g.n))
    else:
        report = verify_cb_separators(g, args.c, args.beta, mode=args.mode, seed=args.seed, samples=args.samples)
        _emit(report.to_json_dict())
        if not report.consistent:
            return EXIT_VALIDATION
    return EXIT_OK


def _cmd_minor(args) -> int:
    g = _load_graph(args.file)
    if args.sub == "contract":
        model = _load_model(args.model, g)
        _emit(contract_model(model).to_json_dict())
    elif args.sub == "nabla-exact":
        _emit(nabla_exact(g, args.r).to_json_dict())
    elif args.sub == "nabla-greedy":
        _emit(nabla_greedy(g, args.r, seed=args.seed, restarts=args.restarts).to_json_dict())
    else:
        model = greedy_shallow_clique(g, args.t, args.depth, seed=args.seed)
        if model is None:
            _emit({"found": False, "note": "greedy search failed; no nonexistence claim"})
        else:
            _emit({"found": True, "model": model.to_json_dict()})
    return EXIT_OK


def _cmd_tw(args) -> int:
    g = _load_graph(args.file)
    if args.sub == "exact":
        width, td = exact_treewidth(g)
        _emit({"treewidth": width, "decomposition": td.to_json_dict()})
    elif args.sub == "from-separators":
        provider = optimal_balanced_separator if args.provider == "oracle" else engine_balanced_separator
        td = decomposition_from_separators(g, provider, k_hint=args.k_hint)
        bad = validate_decomposition(g, td)
        if bad:
            raise ValidationError(bad[0])
        _emit(
            {
                "decomposition": td.to_json_dict(),
                "achieved_width": td.width,
                "reference_105_k_hint": 105.0 * args.k_hint,
            }
        )
    else:
        td = _load_td(args.td)
        sep = separator_from_decomposition(g, td)
        _emit(sep.to_json_dict(g.n))
    return EXIT_OK


def _cmd_family(args) -> int:
    spec = parse_family_spec(args.spec)
    g = generate_family(spec)
    text = write_graph(g)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    if args.sub == "solve-a":
        a = solve_a(args.delta, args.c, tol=args.tol)
        residual = a**args.delta - 4.0 * args.c * math.log(math.e * a) ** 2
        _emit({"a": a, "residual": residual, "tol": args.tol})
        return EXIT_OK
    rows = []
    for c in args.c:
        for delta in args.delta:
            for r in args.r:
                params = BoundParams(c=c, delta=delta, r=r, n0=args.n0)
                bval, m, t = eval_b(params)
                pval = eval_p(params)
                fval = eval_f(params)
                rows.append(
                    {
                        "c": c,
                        "delta": delta,
                        "eps": float(params.effective_epsilon),
                        "r": r,
                        "m": m,
                        "t_log10": math.log10(t),
                        "b": bval.to_json_dict(),
                        "p": pval.to_json_dict(),
                        "f": fval.to_json_dict(),
                    }
                )
    if args.format == "json":
        _emit(rows)
    else:
        print("c,delta,eps,r,m,t_log10,b_log10,p_log10,f_log10")
        for row in rows:
            print(
                f"{row['c']:g},{row['delta']:g},{row['eps']:.12g},{row['r']},{row['m']},"
                f"{row['t_log10']:.12g},{row['b']['log10']:.12g},{row['p']['log10']:.12g},{row['f']['log10']:.12g}"
            )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = experiments.load_config(args.config)
    cfg = cfg.with_overrides(out_dir=args.out_dir, seed=args.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    csv_path = os.path.join(cfg.out_dir, f"{args.sub}-{cfg.family}.csv")
    svg_path = os.path.join(cfg.out_dir, f"{args.sub}-{cfg.family}.svg")
    with experiments.RecordWriter(csv_path=csv_path) as writer:
        if args.sub == "separator-scaling":
            records, fit, minor_arms = experiments.run_separator_scaling(cfg, writer)
            pts = [(r.n, r.value) for r in records if r.metric == "separator_order" and r.value > 0]
            experiments.write_svg_scatter(svg_path, pts, fit, f"separator order vs n ({cfg.family})")
            _emit(
                {
                    "csv": csv_path,
                    "svg": svg_path,
                    "records": len(records),
                    "minor_arms": minor_arms,
                    "fit": fit.to_json_dict() if fit else None,
                }
            )
        elif args.sub == "expansion-scaling":
            records, fit = experiments.run_expansion_scaling(cfg, writer)
            pts = [(float(r.metric.split("r=")[1].rstrip("]")), r.value)
                   for r in records if r.metric.startswith("nabla_greedy") and r.value > 0]
            pts = [(x, y) for x, y in pts if x > 0]
            experiments.write_svg_scatter(svg_path, pts, fit, f"depth-r density ({cfg.family})", xlabel="r", ylabel="density")
            _emit({"csv": csv_path, "svg": svg_path, "records": len(records), "fit": fit.to_json_dict() if fit else None})
        else:
            records, fits = experiments.run_bound_table(cfg, writer)
            _emit(
                {
                    "csv": csv_path,
                    "records": len(records),
                    "slopes": {
                        f"c={c:g},delta={d:g}": {k: v.exponent for k, v in local.items()}
                        for (c, d), local in fits.items()
                    },
                }
            )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd == "graph":
            return _cmd_graph(args)
        if args.cmd == "separate":
            return _cmd_separate(args)
        if args.cmd == "minor":
            return _cmd_minor(args)
        if args.cmd == "tw":
            return _cmd_tw(args)
        if args.cmd == "family":
            return _cmd_family(args)
        if args.cmd == "bounds":
            return _cmd_bounds(args)
        if args.cmd == "experiment":
            return _cmd_experiment(args)
        raise UsageError(f"unknown command {args.cmd!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, GraphParseError, FileNotFoundError, KeyError) as exc:
        if isinstance(exc, ValidationError):
            print(f"validation failure: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimitError as exc:
        print(f"size limit: {exc}", file=sys.stderr)
        return EXIT_SIZE_LIMIT
    except CertificationError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
