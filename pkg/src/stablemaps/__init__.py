"""Exact strata algebras and double-ramification relations on stable-map spaces."""
from .target import (ChowElement, Target, TargetError, make_point_target, make_projective_space,
                     resolve_target, load_target, dump_target)
from .graphs import (StableGraph, GraphError, enumerate_graphs, canonicalize, automorphisms,
                     automorphism_order, validate)
from .algebra import (Ambient, AlgebraError, DecoratedTerm, StrataElement, multiply,
                      psi_class, xi_class, kappa_class, eta_class, graph_class,
                      glue_along_graph, relabel_legs, element_to_doc, element_from_doc)
from .stabilization import (StabilizationError, pullback_boundary, pullback_psi, pullback_kappa1,
                            forgetful_pullback, forgetful_pushforward, forget_leg)
from .dr import (DRError, CrossValidationError, DRRequest, compute_P_d_r, interpolate_in_r,
                 compute_P_d_symbolic, enumerate_weightings, extract_coefficient,
                 m_graded_part, m_graded_parts_by_scaling)
from .oracle import OracleError, paper_fixture, evaluate_m04_point, run_suites

__version__ = "0.1.0"
