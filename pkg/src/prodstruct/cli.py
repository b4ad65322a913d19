"""Command-line front door: build/verify pipelines over certificate files.

Exit codes: 0 = success/accept, 1 = reject (witness on stdout), 2 = input
error.  Builders write their artifacts next to an --out prefix; every
builder output can be re-checked by the matching verify-* subcommand.
Randomized subcommands take an explicit seed and are otherwise
deterministic, so outputs are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import formats
from .graphs import LoopGraph, check_induced_embedding
from .expressions import evaluate, grid_expression, validate
from .treedec import DEFAULT_TW_CAP, exact_treewidth, validate_decomposition
from .induced import build_expression, build_induced_factor, path_case
from .planar import build_planar_structure, verify_nice_structure
from .twinwidth import (contraction_from_path_expression,
                        star_subdivision_embedding, verify_contraction_sequence,
                        verify_star_subdivision)
from .generators import delaunay_triangulation

TW_CAP_ENV = "PRODSTRUCT_TW_CAP"


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _load_graph(path: str) -> LoopGraph:
    try:
        return formats.read_graph(_read(path))
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


# ---------------------------------------------------------------------------
# subcommand handlers (return the process exit code)

def cmd_eval(args) -> int:
    expr = formats.read_expression(_read(args.expr),
                                   base_dir=os.path.dirname(args.expr) or ".")
    diags = [d for d in validate(expr) if d.fatal]
    if diags:
        for d in diags:
            print(d)
        return 1
    value = evaluate(expr)
    text = formats.write_graph(value.graph)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_grid_expr(args) -> int:
    expr, param = grid_expression(args.a, args.b)
    param_file = args.out + ".param.g"
    _write(param_file, formats.write_graph(param))
    _write(args.out + ".expr",
           formats.write_expression(expr, os.path.basename(param_file)))
    print(f"grid {args.a}x{args.b}: ell={expr.ell} value={args.a * args.b} vertices")
    return 0


def _load_product_instance(args):
    ps, nq, nm = formats.read_product_subgraph(_read(args.psub))
    q = _load_graph(args.qgraph)
    m = _load_graph(args.mgraph)
    if q.n != nq or m.n != nm:
        raise InputError("psub header disagrees with the factor sizes")
    td, n_decl = formats.read_decomposition(_read(args.td))
    if n_decl != m.n:
        raise InputError("decomposition header disagrees with |V(M)|")
    v = validate_decomposition(m, td)
    if not v:
        raise InputError(f"invalid decomposition: {v.reason} {v.witness}")
    return ps, q, m, td


def _emit_factor_outputs(args, ps, fc) -> None:
    _write(args.out + ".m2.g", formats.write_graph(fc.m2))
    _write(args.out + ".m2.td", formats.write_decomposition(fc.td2, fc.m2.n))
    _write(args.out + ".m2.emb", formats.write_embedding(fc.embedding))
    _write(args.out + ".sub.g", formats.write_graph(ps.graph()))


def cmd_from_product(args) -> int:
    ps, q, m, td = _load_product_instance(args)
    ec = build_expression(ps, q, m, td)
    param_file = args.out + ".param.g"
    _write(param_file, formats.write_graph(ec.expr.param))
    _write(args.out + ".expr",
           formats.write_expression(ec.expr, os.path.basename(param_file)))
    fc = build_induced_factor(ps, q, m, td, d=args.refined_d)
    _emit_factor_outputs(args, ps, fc)
    rep = fc.report
    print(f"delta={rep.delta} k={rep.k} ell_used={ec.ell_used} "
          f"cw_bound={rep.cw_general} width_interned={fc.width_interned} "
          f"tw_bound={rep.tw_general}")
    if rep.d is not None:
        print(f"refined d={rep.d}: cw_bound={rep.cw_refined} tw_bound={rep.tw_refined}")
    verdict = check_induced_embedding(ps.graph(), fc.embedding)
    if not verdict:
        print(f"reject {verdict.reason} witness {verdict.witness}")
        return 1
    return 0


def cmd_path_case(args) -> int:
    ps, q, m, td = _load_product_instance(args)
    try:
        res = path_case(ps, q, m, td)
    except ValueError as e:
        raise InputError(str(e)) from e
    ec, fc = res.expression, res.factor
    param_file = args.out + ".param.g"
    _write(param_file, formats.write_graph(ec.expr.param))
    _write(args.out + ".expr",
           formats.write_expression(ec.expr, os.path.basename(param_file)))
    _emit_factor_outputs(args, ps, fc)
    rep = res.report
    print(f"k={rep.k} ell_used={ec.ell_used} ell_bound={rep.cw_refined} "
          f"width_interned={fc.width_interned} tw_bound={rep.tw_refined}")
    verdict = check_induced_embedding(ps.graph(), fc.embedding)
    if not verdict:
        print(f"reject {verdict.reason} witness {verdict.witness}")
        return 1
    return 0


def cmd_planar_build(args) -> int:
    eg = formats.read_embedded(_read(args.embedded))
    res = build_planar_structure(eg)
    nps = res.structure
    _write(args.out + ".tri.eg", formats.write_embedded(res.triangulation))
    _write(args.out + ".factor.g", formats.write_graph(nps.m))
    _write(args.out + ".td", formats.write_decomposition(nps.td, nps.m.n))
    _write(args.out + ".structure", formats.write_structure(nps))
    _write(args.out + ".emb", formats.write_embedding(res.embedding))
    _write(args.out + ".orig.emb", formats.write_embedding(res.original_embedding))
    max_bag = max(len(b) for b in nps.td.bags)
    print(f"paths={len(nps.paths)} p_len={nps.p_len} "
          f"max_bag={max_bag} width={nps.td.width()}")
    return 0


def cmd_verify_embedding(args) -> int:
    g = _load_graph(args.graph)
    left = _load_graph(args.left)
    right = _load_graph(args.right)
    emb = formats.read_embedding(_read(args.embedding), left, right)
    v = check_induced_embedding(g, emb)
    if not v:
        print(f"reject {v.reason} witness {v.witness}")
        return 1
    print("accept")
    return 0


def cmd_verify_td(args) -> int:
    g = _load_graph(args.graph)
    td, n = formats.read_decomposition(_read(args.td))
    if n != g.n:
        raise InputError("decomposition header disagrees with |V|")
    v = validate_decomposition(g, td)
    if not v:
        print(f"reject {v.reason} witness {v.witness}")
        return 1
    print(f"accept width {td.width()}")
    return 0


def cmd_verify_nice(args) -> int:
    eg = formats.read_embedded(_read(args.embedded))
    m = _load_graph(args.factor)
    td, n_decl = formats.read_decomposition(_read(args.td))
    if n_decl != m.n:
        raise InputError("decomposition header disagrees with the factor")
    nps = formats.read_structure(_read(args.structure), m, td)
    from .graphs import path_graph
    emb = formats.read_embedding(_read(args.embedding),
                                 path_graph(nps.p_len + 1), m)
    v = verify_nice_structure(eg.graph, nps, emb)
    if not v:
        print(f"reject {v.reason} witness {v.witness}")
        return 1
    max_bag = max(len(b) for b in td.bags)
    print(f"accept max_bag {max_bag} width {td.width()}")
    return 0


def cmd_verify_contractions(args) -> int:
    g = _load_graph(args.graph)
    seq = formats.read_contraction_sequence(_read(args.sequence), g)
    try:
        max_red, step = verify_contraction_sequence(g, seq.steps)
    except ValueError as e:
        print(f"reject {e}")
        return 1
    print(f"maxred {max_red} at step {step}")
    if args.bound is not None and max_red > args.bound:
        print(f"reject bound {args.bound} exceeded")
        return 1
    return 0


def cmd_tww_from_expr(args) -> int:
    expr = formats.read_expression(_read(args.expr),
                                   base_dir=os.path.dirname(args.expr) or ".")
    try:
        seq = contraction_from_path_expression(expr)
    except ValueError as e:
        raise InputError(str(e)) from e
    if args.out:
        _write(args.out, formats.write_contraction_sequence(seq))
    max_red, step = verify_contraction_sequence(seq.initial, seq.steps)
    from .expressions import expression_ell
    ell = expression_ell(expr)
    bound = 5 * ell - 2
    print(f"maxred {max_red} at step {step} bound {bound} (ell {ell})")
    return 0 if max_red <= bound else 1


def cmd_tw_exact(args) -> int:
    g = _load_graph(args.graph)
    cap = args.cap
    if cap is None:
        cap = int(os.environ.get(TW_CAP_ENV, DEFAULT_TW_CAP))
    try:
        width, td = exact_treewidth(g, cap=cap)
    except ValueError as e:
        raise InputError(str(e)) from e
    print(f"treewidth {width}")
    if args.out:
        _write(args.out, formats.write_decomposition(td, g.n))
    return 0


def cmd_star_subdiv(args) -> int:
    g = _load_graph(args.graph)
    res = star_subdivision_embedding(g)
    if args.out:
        _write(args.out + ".sub.g", formats.write_graph(res.subdivision))
        _write(args.out + ".star.g", formats.write_graph(res.embedding.left))
        _write(args.out + ".emb", formats.write_embedding(res.embedding))
    problems = verify_star_subdivision(res)
    if problems:
        for p in problems:
            print(f"reject {p}")
        return 1
    print(f"accept n_star {res.n_star} a {len(res.a_side)} b {len(res.b_side)}")
    return 0


def cmd_export_dot(args) -> int:
    g = _load_graph(args.graph)
    text = formats.write_dot(g) if args.format == "dot" else formats.write_graph(g)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen_planar(args) -> int:
    eg = delaunay_triangulation(args.n, args.seed)
    text = formats.write_embedded(eg)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="prodstruct",
        description="Builders and verifiers for induced product structure.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression file to a graph")
    p.add_argument("expr")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("grid-expr", help="expression building the a x b grid")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(fn=cmd_grid_expr)

    p = sub.add_parser("from-product",
                       help="product subgraph to expression + factor certificate")
    p.add_argument("psub")
    p.add_argument("qgraph")
    p.add_argument("mgraph")
    p.add_argument("td")
    p.add_argument("--out", required=True)
    p.add_argument("--refined-d", type=int, default=None)
    p.set_defaults(fn=cmd_from_product)

    p = sub.add_parser("path-case",
                       help="both constructions over a path left factor (d=3)")
    p.add_argument("psub")
    p.add_argument("qgraph")
    p.add_argument("mgraph")
    p.add_argument("td")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_path_case)

    p = sub.add_parser("planar-build",
                       help="embedded planar graph to width-39 structure")
    p.add_argument("embedded")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_planar_build)

    p = sub.add_parser("verify-embedding", help="check an induced embedding")
    p.add_argument("graph")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("embedding")
    p.set_defaults(fn=cmd_verify_embedding)

    p = sub.add_parser("verify-td", help="check a tree decomposition")
    p.add_argument("graph")
    p.add_argument("td")
    p.set_defaults(fn=cmd_verify_td)

    p = sub.add_parser("verify-nice", help="check a nice product structure")
    p.add_argument("embedded")
    p.add_argument("factor")
    p.add_argument("td")
    p.add_argument("structure")
    p.add_argument("embedding")
    p.set_defaults(fn=cmd_verify_nice)

    p = sub.add_parser("verify-contractions", help="replay a contraction sequence")
    p.add_argument("graph")
    p.add_argument("sequence")
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(fn=cmd_verify_contractions)

    p = sub.add_parser("tww-from-expr",
                       help="contraction sequence from a path-parameter expression")
    p.add_argument("expr")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_tww_from_expr)

    p = sub.add_parser("tw-exact", help="exact tree-width with witness")
    p.add_argument("graph")
    p.add_argument("--cap", type=int, default=None,
                   help=f"vertex cap (default ${TW_CAP_ENV} or {DEFAULT_TW_CAP})")
    p.add_argument("--out", help="witness decomposition file")
    p.set_defaults(fn=cmd_tw_exact)

    p = sub.add_parser("star-subdiv",
                       help="3-subdivision embedding into a star product")
    p.add_argument("graph")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_star_subdiv)

    p = sub.add_parser("export-dot", help="export a graph file")
    p.add_argument("graph")
    p.add_argument("-o", "--out")
    p.add_argument("--format", choices=("dot", "text"), default="dot")
    p.set_defaults(fn=cmd_export_dot)

    p = sub.add_parser("gen-planar", help="seeded random planar triangulation")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_gen_planar)

    return ap


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (InputError, formats.FormatError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
