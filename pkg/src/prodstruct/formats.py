"""Line-based text formats for graphs, expressions, decompositions,
product subgraphs, embeddings, contraction sequences and structures.

All formats share the conventions: one record per line, whitespace
separated, ``#`` starts a comment, vertex ids are the dense integers of the
in-memory objects.  Writers emit records in sorted order so equal objects
serialize byte-identically.
"""

from __future__ import annotations

import os
from typing import Iterable, Optional

from .graphs import LoopGraph, ProductEmbedding
from .expressions import (AddEdges, Create, Node, ParamExpression,
                          Recolor, Union, postorder)
from .treedec import TreeDecomposition
from .induced import ProductSubgraph
from .planar import EmbeddedGraph, NiceProductStructure
from .twinwidth import ContractionSequence


def _records(text: str) -> Iterable[list[str]]:
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line.split()


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# graphs

def write_graph(g: LoopGraph) -> str:
    out = [f"graph {g.n}"]
    out += [f"e {u} {v}" for (u, v) in sorted(g.edges)]
    out += [f"l {v}" for v in sorted(g.loops)]
    return "\n".join(out) + "\n"


def read_graph(text: str) -> LoopGraph:
    n = None
    edges, loops = [], []
    for rec in _records(text):
        if rec[0] == "graph":
            n = int(rec[1])
        elif rec[0] == "e":
            edges.append((int(rec[1]), int(rec[2])))
        elif rec[0] == "l":
            loops.append(int(rec[1]))
        else:
            raise FormatError(f"unknown graph record {rec[0]!r}")
    if n is None:
        raise FormatError("missing 'graph <n>' header")
    return LoopGraph(n, edges, loops)


def write_dot(g: LoopGraph, name: str = "g") -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        label = g.names[v] if g.names else str(v)
        lines.append(f'  {v} [label="{label}"];')
    for (u, v) in sorted(g.edges):
        lines.append(f"  {u} -- {v};")
    for v in sorted(g.loops):
        lines.append(f"  {v} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# expressions (postfix: create pushes, union pops two, unary ops wrap the top)

def _write_ops(root: Node, with_pvertex: bool) -> list[str]:
    out = []
    for node in postorder(root):
        if isinstance(node, Create):
            out.append(f"create {node.colour} {node.pvertex}" if with_pvertex
                       else f"create {node.colour}")
        elif isinstance(node, Union):
            out.append("union")
        elif isinstance(node, AddEdges):
            out.append(f"addedges {node.i} {node.j}")
        else:
            out.append(f"recolor {node.i} {node.j}")
    return out


def write_expression(expr: ParamExpression, param_file: str) -> str:
    lines = [f"expr ell={expr.ell} param={param_file}"]
    lines += _write_ops(expr.root, with_pvertex=True)
    return "\n".join(lines) + "\n"


def _parse_ops(recs: list[list[str]], with_pvertex: bool) -> Node:
    stack: list[Node] = []
    for rec in recs:
        op = rec[0]
        if op == "create":
            pv = int(rec[2]) if with_pvertex and len(rec) > 2 else 0
            stack.append(Create(int(rec[1]), pv))
        elif op == "union":
            if len(stack) < 2:
                raise FormatError("union needs two frames on the stack")
            right = stack.pop()
            left = stack.pop()
            stack.append(Union(left, right))
        elif op == "addedges":
            if not stack:
                raise FormatError("addedges needs a frame on the stack")
            stack.append(AddEdges(int(rec[1]), int(rec[2]), stack.pop()))
        elif op == "recolor":
            if not stack:
                raise FormatError("recolor needs a frame on the stack")
            stack.append(Recolor(int(rec[1]), int(rec[2]), stack.pop()))
        else:
            raise FormatError(f"unknown expression op {op!r}")
    if len(stack) != 1:
        raise FormatError(f"expression leaves {len(stack)} frames on the stack")
    return stack[0]


def read_expression(text: str, base_dir: str = ".",
                    param: Optional[LoopGraph] = None) -> ParamExpression:
    """Parse an expression file; the header's param= graph file is resolved
    relative to ``base_dir`` unless a parameter graph is supplied."""
    recs = list(_records(text))
    if not recs or recs[0][0] != "expr":
        raise FormatError("missing 'expr' header")
    header = recs[0]
    ell = None
    param_file = None
    for field in header[1:]:
        key, _, value = field.partition("=")
        if key == "ell":
            ell = int(value)
        elif key == "param":
            param_file = value
    if ell is None:
        raise FormatError("header lacks ell=")
    if param is None:
        if param_file is None:
            raise FormatError("header lacks param= and no graph supplied")
        with open(os.path.join(base_dir, param_file)) as fh:
            param = read_graph(fh.read())
    root = _parse_ops(recs[1:], with_pvertex=True)
    return ParamExpression(root, ell, param)


# ---------------------------------------------------------------------------
# tree decompositions (root is node 0)

def write_decomposition(td: TreeDecomposition, n: int) -> str:
    if td.root != 0:
        raise ValueError("format requires root node 0")
    lines = [f"td {td.num_nodes} {td.width() + 1} {n}"]
    for t, bag in enumerate(td.bags):
        lines.append("b " + " ".join([str(t)] + [str(v) for v in sorted(bag)]))
    for t, par in enumerate(td.parent):
        if par >= 0:
            lines.append(f"t {par} {t}")
    return "\n".join(lines) + "\n"


def read_decomposition(text: str) -> tuple[TreeDecomposition, int]:
    nodes = width1 = n = None
    bags: dict[int, frozenset[int]] = {}
    parent: dict[int, int] = {}
    for rec in _records(text):
        if rec[0] == "td":
            nodes, width1, n = int(rec[1]), int(rec[2]), int(rec[3])
        elif rec[0] == "b":
            bags[int(rec[1])] = frozenset(int(v) for v in rec[2:])
        elif rec[0] == "t":
            parent[int(rec[2])] = int(rec[1])
        else:
            raise FormatError(f"unknown decomposition record {rec[0]!r}")
    if nodes is None:
        raise FormatError("missing 'td' header")
    bag_list = tuple(bags.get(t, frozenset()) for t in range(nodes))
    parent_list = tuple(parent.get(t, -1) for t in range(nodes))
    if parent_list.count(-1) != 1 or parent_list[0] != -1:
        raise FormatError("exactly node 0 must be the root")
    td = TreeDecomposition(parent_list, bag_list, 0)
    if td.width() + 1 != width1:
        raise FormatError(f"declared width+1 {width1} != actual {td.width() + 1}")
    return td, n


# ---------------------------------------------------------------------------
# product subgraphs

def write_product_subgraph(g: ProductSubgraph, nq: int, nm: int) -> str:
    lines = [f"psub {nq} {nm}"]
    lines += [f"v {a} {b}" for (a, b) in g.members]
    lines += [f"e {x} {y}" for (x, y) in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def read_product_subgraph(text: str) -> tuple[ProductSubgraph, int, int]:
    nq = nm = None
    members: list[tuple[int, int]] = []
    edges: list[tuple[int, int]] = []
    for rec in _records(text):
        if rec[0] == "psub":
            nq, nm = int(rec[1]), int(rec[2])
        elif rec[0] == "v":
            members.append((int(rec[1]), int(rec[2])))
        elif rec[0] == "e":
            edges.append((int(rec[1]), int(rec[2])))
        else:
            raise FormatError(f"unknown psub record {rec[0]!r}")
    if nq is None:
        raise FormatError("missing 'psub' header")
    for (x, y) in edges:
        if not (0 <= x < len(members) and 0 <= y < len(members)):
            raise FormatError(f"edge ({x},{y}) indexes outside the member list")
    ps = ProductSubgraph.build(members,
                               [(members[x], members[y]) for (x, y) in edges])
    return ps, nq, nm


# ---------------------------------------------------------------------------
# embeddings

def write_embedding(emb: ProductEmbedding) -> str:
    lines = [f"embedding {len(emb.image)} {emb.left.n} {emb.right.n}"]
    for x, (a, b) in enumerate(emb.image):
        lines.append(f"emb {x} {a} {b}")
    return "\n".join(lines) + "\n"


def read_embedding(text: str, left: LoopGraph, right: LoopGraph
                   ) -> ProductEmbedding:
    size = None
    image: dict[int, tuple[int, int]] = {}
    for rec in _records(text):
        if rec[0] == "embedding":
            size = int(rec[1])
        elif rec[0] == "emb":
            image[int(rec[1])] = (int(rec[2]), int(rec[3]))
        else:
            raise FormatError(f"unknown embedding record {rec[0]!r}")
    if size is None:
        raise FormatError("missing 'embedding' header")
    if sorted(image) != list(range(size)):
        raise FormatError("embedding lines must cover 0..size-1")
    return ProductEmbedding(left, right, tuple(image[x] for x in range(size)))


# ---------------------------------------------------------------------------
# contraction sequences

def write_contraction_sequence(seq: ContractionSequence) -> str:
    lines = [f"trigraph {seq.initial.n}"]
    fresh = seq.initial.n
    for (u, v) in seq.steps:
        lines.append(f"c {u} {v} -> {fresh}")
        fresh += 1
    return "\n".join(lines) + "\n"


def read_contraction_sequence(text: str, g: LoopGraph) -> ContractionSequence:
    steps = []
    fresh = g.n
    for rec in _records(text):
        if rec[0] == "trigraph":
            if int(rec[1]) != g.n:
                raise FormatError("sequence header disagrees with the graph size")
        elif rec[0] == "c":
            if len(rec) != 5 or rec[3] != "->":
                raise FormatError("contraction lines read 'c <u> <v> -> <new>'")
            if int(rec[4]) != fresh:
                raise FormatError(f"expected fresh id {fresh}, got {rec[4]}")
            steps.append((int(rec[1]), int(rec[2])))
            fresh += 1
        else:
            raise FormatError(f"unknown sequence record {rec[0]!r}")
    return ContractionSequence(g, tuple(steps))


# ---------------------------------------------------------------------------
# embedded graphs

def write_embedded(eg: EmbeddedGraph) -> str:
    out = [write_graph(eg.graph).rstrip("\n")]
    for v in range(eg.graph.n):
        out.append("rot " + " ".join([str(v)] + [str(w) for w in eg.rotation[v]]))
    cyc = eg.outer_cycle()
    out.append("outer " + " ".join(str(v) for v in cyc[:3]))
    return "\n".join(out) + "\n"


def read_embedded(text: str) -> EmbeddedGraph:
    n = None
    edges, loops = [], []
    rot: dict[int, tuple[int, ...]] = {}
    outer = None
    for rec in _records(text):
        if rec[0] == "graph":
            n = int(rec[1])
        elif rec[0] == "e":
            edges.append((int(rec[1]), int(rec[2])))
        elif rec[0] == "l":
            loops.append(int(rec[1]))
        elif rec[0] == "rot":
            rot[int(rec[1])] = tuple(int(w) for w in rec[2:])
        elif rec[0] == "outer":
            outer = tuple(int(v) for v in rec[1:])
        else:
            raise FormatError(f"unknown embedded-graph record {rec[0]!r}")
    if n is None or outer is None:
        raise FormatError("embedded graph needs 'graph' and 'outer' lines")
    if loops:
        raise FormatError("embedded graphs must be simple")
    rotation = tuple(rot.get(v, ()) for v in range(n))
    eg = EmbeddedGraph(LoopGraph(n, edges), rotation, (outer[0], outer[1]))
    eg.check()
    return eg


# ---------------------------------------------------------------------------
# nice product structures (factor/decomposition/embedding in own files)

def write_structure(nps: NiceProductStructure) -> str:
    lines = [f"structure {len(nps.paths)} {nps.p_len} {nps.root}"]
    for pid, vs in enumerate(nps.paths):
        lines.append("path " + " ".join([str(pid)] + [str(v) for v in vs]))
    for v in sorted(nps.slot):
        pid, j = nps.slot[v]
        lines.append(f"slot {v} {pid} {j}")
    return "\n".join(lines) + "\n"


def read_structure(text: str, m: LoopGraph, td: TreeDecomposition
                   ) -> NiceProductStructure:
    header = None
    paths: dict[int, list[int]] = {}
    slot: dict[int, tuple[int, int]] = {}
    for rec in _records(text):
        if rec[0] == "structure":
            header = (int(rec[1]), int(rec[2]), int(rec[3]))
        elif rec[0] == "path":
            paths[int(rec[1])] = [int(v) for v in rec[2:]]
        elif rec[0] == "slot":
            slot[int(rec[1])] = (int(rec[2]), int(rec[3]))
        else:
            raise FormatError(f"unknown structure record {rec[0]!r}")
    if header is None:
        raise FormatError("missing 'structure' header")
    count, p_len, root = header
    if sorted(paths) != list(range(count)):
        raise FormatError("path lines must cover 0..count-1")
    return NiceProductStructure(p_len, [paths[i] for i in range(count)],
                                slot, m, td, root)
