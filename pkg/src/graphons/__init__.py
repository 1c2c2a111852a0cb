"""Step graphons at desk scale.

Finite-support graphons with exact rational arithmetic: homomorphism
densities of k-labeled and quantum graphs, graphon metrics and
purification, spectral decomposition and truncation, automorphism groups
and their orbits, connection-matrix ranks, node-transitivity tests, and
Cayley graphon constructions.
"""

from .cayley import (CayleyConversion, FiniteGroup, cayley_graphon,
                     group_builtin, symmetric_connection, transitive_to_cayley)
from .density import Caps, t, t_graph, t_quantum, t_restricted
from .errors import CapExceeded, GraphonError, InputError
from .graphs import (LabeledGraph, QuantumGraph, blow_up, builtin_quantum,
                     canonical_key, complete, cycle, empty, enumerate_klabeled,
                     frucht, glue_product, multi_edge, named_graph, path,
                     path_both_labeled, petersen, star, subdivide_edge, unlabel)
from .metrics import (MetricMatrix, is_pure, l2_metric, merge_twins,
                      neighborhood_metric, similarity_distance,
                      similarity_metric, un_approximation)
from .spectral import (SpectralDecomposition, SpectralEmbedding, decompose,
                       embedding, truncate)
from .stepgraphon import (StepGraphon, StepKernel, circle, constant, cyclic,
                          direct_sum, dyadic, from_simple_graph, generator,
                          l1_distance, nonlip, operator_power,
                          operator_product, pullback, random_rational,
                          sample_wrandom, validate)
from .symmetry import (AutGroup, ConnectionMatrix, SpectralActionReport,
                       TransitivityReport, algebra_dimension, automorphisms,
                       connection_matrix, connection_entry_direct, is_psd,
                       matrix_rank, node_transitivity_report, oracle_partition,
                       orbit_equiv_oracle, orbit_labels, orbits, r_operator,
                       spectral_action_check)

__version__ = "0.1.0"
