"""Two-way translation between factor expressions and induced-product
certificates.

Forward: a classic expression valued M plus a simple graph H' yield a
parameterized expression over the reflexive closure of H' whose value is
H' x M (strong product), built by substituting a two-colour copy of H' for
every create node.

Backward: a parameterized expression over a reflexive graph yields a factor
M (the classic reinterpretation of the same expression), and mapping every
value vertex x to (pvertex(x), x) embeds the value into H' x M as an
induced subgraph.  Certificates are checked, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import (LoopGraph, ProductEmbedding, Verdict, reflexive_closure,
                     strip_loops, check_induced_embedding)
from .expressions import (AddEdges, ClassicExpression, Create, Node,
                          ParamExpression, Recolor, Union, evaluate,
                          evaluate_classic, postorder, strip_pvertices,
                          validate)


@dataclass(frozen=True)
class FactorCertificate:
    """Factor pair plus the embedding claimed to be induced.

    ``cw_witness`` is the classic expression valued m; its budget equals the
    source expression's, which is the clique-width witness the equivalence
    promises.
    """
    hprime: LoopGraph
    m: LoopGraph
    embedding: ProductEmbedding
    cw_witness: ClassicExpression
    value: LoopGraph


def _hprime_copy(hprime: LoopGraph, final_colour: int, helper: int) -> Node:
    """Standalone two-colour builder of a loopless copy of hprime.

    Vertices arrive in id order on the helper colour and are folded into
    final_colour; addedges(final, helper) fires exactly on the copy's edges
    because every pvertex occurs once.
    """
    node: Optional[Node] = None
    for v in range(hprime.n):
        created = Create(helper, v)
        node = created if node is None else Union(node, created)
        if v > 0:
            node = AddEdges(final_colour, helper, node)
        node = Recolor(helper, final_colour, node)
    assert node is not None
    return node


def expression_from_factor(mexpr: ClassicExpression, hprime: LoopGraph
                           ) -> ParamExpression:
    """Parameterized expression over reflexive(hprime) valued hprime x M.

    Every create of colour i in mexpr is replaced by an independent copy of
    hprime recoloured wholesale to i; union, addedges and recolor pass
    through unchanged and act per the parameterized semantics.  Needs at
    least two colours to build the copies.
    """
    if mexpr.ell < 2:
        raise ValueError("need colour budget >= 2 to build factor copies")
    if hprime.loops:
        raise ValueError("hprime must be simple")
    if hprime.n == 0:
        raise ValueError("hprime must be non-empty")
    stack: list[Node] = []
    for node in postorder(mexpr.root):
        if isinstance(node, Create):
            helper = 1 if node.colour != 1 else 2
            stack.append(_hprime_copy(hprime, node.colour, helper))
        elif isinstance(node, Union):
            right = stack.pop()
            stack.append(Union(stack.pop(), right))
        elif isinstance(node, AddEdges):
            stack.append(AddEdges(node.i, node.j, stack.pop()))
        else:
            stack.append(Recolor(node.i, node.j, stack.pop()))
    return ParamExpression(stack[0], mexpr.ell, reflexive_closure(hprime))


def product_embedding_for_factor(mexpr: ClassicExpression, hprime: LoopGraph,
                                 expr: ParamExpression) -> ProductEmbedding:
    """Identity-style map of the transformed expression's value onto
    hprime x M, with M evaluated from mexpr.

    Copy b of hprime occupies value ids b*|H'| .. (created in id order), so
    value vertex b*|H'| + a maps to product coordinate (a, b).
    """
    m = evaluate_classic(mexpr).graph
    nh = hprime.n
    value = evaluate(expr)
    if value.graph.n != nh * m.n:
        raise ValueError("value size does not match the product")
    image = []
    for x in range(value.graph.n):
        b, a = divmod(x, nh)
        image.append((a, b))
    return ProductEmbedding(hprime, m, tuple(image))


def factor_from_expression(expr: ParamExpression) -> FactorCertificate:
    """Certificate that the expression's value sits induced in H' x M.

    M is the value of the same expression with pvertices discarded (classic
    addedges joins whole colour classes), so M contains the value.  The
    embedding sends x to (pvertex(x), x).  Rejects non-reflexive parameter
    graphs: with loops everywhere, same-pvertex classic edges are exactly
    the value's edges, which is what induced-ness rests on.
    """
    h = expr.param
    if len(h.loops) != h.n:
        raise ValueError("parameter graph must be reflexive")
    bad = [d for d in validate(expr) if d.fatal]
    if bad:
        raise ValueError("invalid expression: " + "; ".join(map(str, bad)))
    value = evaluate(expr)
    classic = strip_pvertices(expr)
    m = evaluate_classic(classic).graph
    hprime = strip_loops(h)
    image = tuple((value.pvertices[x], x) for x in range(value.graph.n))
    emb = ProductEmbedding(hprime, m, image)
    return FactorCertificate(hprime, m, emb, classic, value.graph)


def verify_factor_certificate(cert: FactorCertificate) -> Verdict:
    """Re-check the certificate with the independent embedding referee."""
    return check_induced_embedding(cert.value, cert.embedding)
