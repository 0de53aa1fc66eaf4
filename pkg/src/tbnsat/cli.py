"""Command-line front end.

Exit codes: 0 success (or "yes"), 1 negative answer (not stably free, no
configuration with the requested bound, UNSAT), 2 bad input, 3 solver gave
up, 4 enumeration refused.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import encoder, oracle, queries, reductions
from ._jit import backend_name
from .model import Tbn, TbnError, polymers
from .parser import TbnParseError, emit_result_json, parse_tbn, serialize_tbn
from .sat import DEFAULT_CONFLICT_BUDGET, CdclSolver, SolverError, Verdict, parse_dimacs, solve_external

log = logging.getLogger("tbnsat")

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_UNKNOWN, EXIT_REFUSED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load(args) -> Tbn:
    return parse_tbn(_read_text(args.file), strict=getattr(args, "strict", False))


def _solver_cmd(args) -> str | None:
    cmd = args.solver if args.solver is not None else os.environ.get("TBN_SOLVER")
    if not cmd or cmd == "embedded":
        return None
    if "{file}" not in cmd:
        raise UsageError("external solver template must contain {file}")
    return cmd


def _session_kw(args) -> dict:
    return {
        "seed": args.seed,
        "conflict_budget": args.conflict_budget,
        "time_budget": args.time_budget,
        "solver_cmd": _solver_cmd(args),
        "order": args.order,
    }


def _write(args, text: str):
    out = getattr(args, "output", None)
    if out and out != "-":
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_monomer(t: Tbn, m: int) -> str:
    body = " ".join(str(s) for s in t.monomers[m].sites)
    lab = t.monomers[m].label
    return f"{lab}:{{{body}}}" if lab else f"{{{body}}}"


def _print_polymers(t: Tbn, conf):
    if conf is None:
        return
    print("polymers:")
    for i, g in enumerate(polymers(t, conf).groups, start=1):
        print(f"  {i:>3}: " + " ".join(_fmt_monomer(t, m) for m in g))


# ------------------------------------------------------------------ commands


def cmd_solve(args) -> int:
    if args.from_dimacs:
        return _solve_dimacs(args)
    t = _load(args)
    kw = _session_kw(args)
    if args.min_polymers is not None:
        k = args.min_polymers
        if k < 1:
            raise UsageError("--min-polymers must be at least 1")
        conf = queries.saturated_config_exists(t, k, **kw)
        found = conf is not None
        if args.json:
            res = queries.QueryResult(len(polymers(t, conf)) if found else 0, None, conf, "existence")
            d = json.loads(emit_result_json(t, res))
            d["min_polymers"] = k
            d["found"] = found
            print(json.dumps(d, indent=2))
        else:
            if found:
                print(f"found saturated configuration with {len(polymers(t, conf))} >= {k} polymers")
                _print_polymers(t, conf)
            else:
                print(f"no saturated configuration has at least {k} polymers")
        return EXIT_OK if found else EXIT_NO

    if args.batch:
        kw.pop("order")
        count, conf = queries.stable_polymer_count(t, batch=True, **kw)
    else:
        count, conf = queries.stable_polymer_count(t, **kw)
    res = queries.QueryResult(count, None, conf, "batch" if args.batch else "binary-search")
    if args.json:
        print(emit_result_json(t, res))
    else:
        print(f"stable polymer count: {count}")
        _print_polymers(t, conf)
    return EXIT_OK


def _solve_dimacs(args) -> int:
    text = _read_text(args.file)
    nvars, clauses = parse_dimacs(text)
    cmd = _solver_cmd(args)
    if cmd:
        out = solve_external(text, cmd, timeout=args.time_budget)
    else:
        s = CdclSolver(num_vars=nvars, seed=args.seed, conflict_budget=args.conflict_budget,
                       time_budget=args.time_budget)
        s.add_clauses(clauses)
        out = s.solve()
    if out.verdict is Verdict.UNKNOWN:
        print("s UNKNOWN")
        return EXIT_UNKNOWN
    if args.json:
        d = {"verdict": out.verdict.value}
        if out.sat:
            legend = encoder.pair_legend(text)
            d["pairs"] = [list(legend[v]) for v in sorted(legend) if out.model[v]]
        print(json.dumps(d, indent=2))
    else:
        print("s SATISFIABLE" if out.sat else "s UNSATISFIABLE")
        if out.sat:
            lits = [v if out.model[v] else -v for v in range(1, nvars + 1)]
            print("v " + " ".join(map(str, lits)) + " 0")
    return EXIT_OK if out.sat else EXIT_NO


_METHODS = {
    "two-query": queries.stably_free,
    "direct": queries.stably_free_direct,
}


def cmd_stably_free(args) -> int:
    t = _load(args)
    if t.n == 0:
        raise UsageError("empty TBN has no monomers")
    try:
        m = t.find_monomer(args.monomer)
    except TbnError as exc:
        raise UsageError(str(exc)) from exc
    kw = _session_kw(args)
    if args.method == "batch":
        kw.pop("order")
        res = queries.stably_free_batch(t, m, **kw)
    else:
        res = _METHODS[args.method](t, m, **kw)
    if args.json:
        print(emit_result_json(t, res))
    else:
        print(f"stable polymer count: {res.stable_polymer_count}")
        print(f"monomer {m} {_fmt_monomer(t, m)} stably free: {'yes' if res.free_verdict else 'no'}")
        print(f"({res.stable_polymer_count}, {res.free_verdict})")
        _print_polymers(t, res.witness)
    return EXIT_OK if res.free_verdict else EXIT_NO


def cmd_encode(args) -> int:
    t = _load(args)
    k = args.k
    if k < 1 or k > t.n:
        raise UsageError(f"k must satisfy 1 <= k <= n (n = {t.n})")
    free = None
    if args.free is not None:
        try:
            free = t.find_monomer(args.free)
        except TbnError as exc:
            raise UsageError(str(exc)) from exc
    enc = encoder.encode_query(t, k, free=free, order=args.order, amo=args.amo)
    _write(args, encoder.to_dimacs(enc.cnf(), enc.vm, t))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    t = _load(args)
    try:
        if args.filter == "saturated":
            n = 0
            for c in oracle.enumerate_configurations(t, "saturated", args.bound):
                if args.dump and (args.limit is None or n < args.limit):
                    _dump_conf(t, n, c, json_mode=args.json)
                n += 1
            if args.json:
                print(json.dumps({"saturated": n}))
            else:
                print(f"{n} saturated")
            return EXIT_OK
        keep = (args.limit if args.limit is not None else 10**9) if args.dump else 0
        rep = oracle.enumeration_report(t, args.bound, keep=keep)
    except oracle.OracleBoundExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    if args.dump:
        for i, (c, sat, k) in enumerate(rep.configurations):
            _dump_conf(t, i, c, sat, k, json_mode=args.json)
    summary = {"total": rep.total, "saturated": rep.saturated, "stable": rep.stable, "S": rep.max_polymers}
    if args.json:
        print(json.dumps(summary))
    else:
        print(f"{rep.total} total, {rep.saturated} saturated, {rep.stable} stable, S={rep.max_polymers}")
    return EXIT_OK


def _dump_conf(t, i, c, sat=None, k=None, json_mode=False):
    pairs = " ".join(f"{t.site_ref(a)}-{t.site_ref(b)}" for a, b in sorted(c.pairs)) or "(none)"
    k = k if k is not None else len(polymers(t, c))
    flag = "" if sat is None else (" saturated" if sat else "")
    print(f"# {i}: polymers={k}{flag} pairs: {pairs}", file=sys.stderr if json_mode else sys.stdout)


def cmd_gen(args) -> int:
    header = []
    if args.family == "exact-cover":
        x = reductions.parse_sets(args.sets)
        t = reductions.exact_cover_to_tbn(x, args.j)
        header.append(f"exact cover gadget, j = {args.j}, sets = {args.sets}")
    elif args.family == "graph-mis":
        g = reductions.parse_edges(args.edges)
        t, vmap = reductions.graph_mis_to_tbn(g)
        header.append(f"independent-set template for edges {args.edges}")
    elif args.family == "vc-transform":
        g = reductions.parse_edges(args.edges)
        g2, hub = reductions.vc_member_to_mis_member(g, args.target)
        t, vmap = reductions.graph_mis_to_tbn(g2)
        header.append(f"doubled graph of {args.edges} with hub for target {args.target}")
        header.append(f"query monomer: {t.monomer_label(vmap[hub])} (index {vmap[hub]})")
    elif args.family == "tree":
        t = reductions.tree_tbn(args.n, order=args.order, seed=args.seed)
        header.append(f"binary tree family, n = {args.n}, order = {args.order}")
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown family {args.family}")
    text = "".join(f"# {h}\n" for h in header) + serialize_tbn(t)
    _write(args, text)
    return EXIT_OK


# ------------------------------------------------------------------ argparse


def _add_solver_flags(p):
    p.add_argument("--solver", default=None,
                   help='"embedded" (default) or an external command template such as "kissat {file}"; '
                        "TBN_SOLVER supplies the default")
    p.add_argument("--seed", type=int, default=0, help="decision tie-breaking seed for the embedded solver")
    p.add_argument("--conflict-budget", type=int, default=DEFAULT_CONFLICT_BUDGET)
    p.add_argument("--time-budget", type=float, default=None, help="seconds per solver call")
    p.add_argument("--order", default=None, choices=["input", "reverse", "most-sites-first"],
                   help="monomer ordering used by the representative encoding")
    p.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    p.add_argument("--strict", action="store_true", help="reject self-complementary monomers")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tbnsat", description="Stable configurations of thermodynamic binding networks")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="stable polymer count and a stable configuration")
    p.add_argument("file")
    p.add_argument("--min-polymers", type=int, default=None, metavar="K",
                   help="single query: is there a saturated configuration with at least K polymers")
    p.add_argument("--batch", action="store_true", help="issue all n bound queries concurrently")
    p.add_argument("--from-dimacs", action="store_true", help="FILE is DIMACS CNF; report the verdict")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stably-free", help="can a monomer be free in some stable configuration")
    p.add_argument("file")
    p.add_argument("--monomer", "-m", required=True, help="label, 0-based index, or site list such as 'e f'")
    p.add_argument("--method", choices=["two-query", "direct", "batch"], default="two-query")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_stably_free)

    p = sub.add_parser("encode", help="write the CNF for one bound query as DIMACS")
    p.add_argument("file")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--free", default=None, help="also require this monomer to be free")
    p.add_argument("--amo", choices=["pairwise", "sequential"], default="pairwise")
    p.add_argument("--order", default=None, choices=["input", "reverse", "most-sites-first"])
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("enumerate", help="exhaustive enumeration (small TBNs only)")
    p.add_argument("file")
    p.add_argument("--filter", choices=["all", "saturated"], default="all")
    p.add_argument("--limit", type=int, default=None, help="dump at most this many configurations")
    p.add_argument("--dump", action="store_true", help="print each configuration")
    p.add_argument("--bound", type=float, default=oracle.DEFAULT_BOUND, help="refuse above this many configurations")
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gen", help="generate instances from the reduction families")
    gsub = p.add_subparsers(dest="family", required=True)
    g = gsub.add_parser("exact-cover")
    g.add_argument("--sets", required=True, help='e.g. "a,b;b,c;c"')
    g.add_argument("-j", type=int, default=2)
    g = gsub.add_parser("graph-mis")
    g.add_argument("--edges", required=True, help='e.g. "a-b,b-c"')
    g = gsub.add_parser("vc-transform")
    g.add_argument("--edges", required=True)
    g.add_argument("--target", required=True)
    g = gsub.add_parser("tree")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("--order", choices=["level", "leaves-first", "shuffled"], default="level")
    g.add_argument("--seed", type=int, default=0)
    for g in gsub.choices.values():
        g.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    log.debug("kernel backend: %s", backend_name())
    try:
        return args.func(args)
    except (TbnParseError, TbnError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except queries.SolverBudgetExceeded as exc:
        print(f"unknown: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
