"""Toolkit for induced (hereditary) product structure of graphs.

Constructions come paired with independent brute-force verifiers: labelled
expressions over a parameter graph, the expression/strong-product factor
equivalence, subgraph-to-induced-subgraph product conversion with the
bounded-width factor, the width-39 planar structure, and contraction
sequences with red-degree replay.
"""

from .graphs import (BfsStructure, LoopGraph, ProductEmbedding, ProductVertex,
                     Verdict, bfs_tree, check_induced_embedding,
                     greedy_square_coloring, reflexive_closure, square,
                     strip_loops, strong_product, subdivide)
from .expressions import (ClassicExpression, LabeledGraph, ParamExpression,
                          cw_expression_bridge, evaluate, evaluate_classic,
                          expression_ell, grid_expression, highcw_family,
                          localize, validate)
from .treedec import (DecompositionContext, TreeDecomposition, binarize,
                      derive_context, exact_treewidth, validate_decomposition)
from .hereditary import (FactorCertificate, expression_from_factor,
                         factor_from_expression, verify_factor_certificate)
from .induced import (BoundReport, InducedFactorCertificate, ProductSubgraph,
                      bound_report, build_expression, build_induced_factor,
                      path_case)
from .planar import (CycleFrame, EmbeddedGraph, NiceProductStructure,
                     build_planar_structure, decompose_cycle, triangulate,
                     verify_nice_structure)
from .twinwidth import (ContractionSequence, contraction_from_path_expression,
                        star_subdivision_embedding,
                        verify_contraction_sequence, verify_star_subdivision)

__version__ = "0.1.0"
