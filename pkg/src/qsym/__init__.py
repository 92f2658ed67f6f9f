"""Classical certificates for quantum symmetries of graphs."""

from .graphs import (Graph, VertexRelation, FormatError, graph, empty_graph,
                     complete_graph, complete_bipartite, path_graph, cycle_graph,
                     circulant, petersen, random_graph, disjoint_union, complement,
                     distance_matrix, distance_graph, components, is_connected,
                     is_planar, cut_vertices, has_cut_vertex, read_graph, write_graph)
from .coherent import (CoherentConfiguration, EquivalenceCertificate, WlComparison,
                       CospectralReport, CirculantVerdict, CirculantCriterion,
                       wl_closure, is_discrete, verify_configuration,
                       in_coherent_algebra, wl_comparison, wl_equivalent,
                       cospectral_report, circulant_no_quantum_symmetry,
                       write_configuration, read_configuration,
                       write_certificate, read_certificate)
from .symmetry import (Permutation, PermutationGroup, OrbitalPartition, HaarValues,
                       ConfigurationGap, automorphism_group, find_isomorphism,
                       is_automorphism, orbits, orbitals, is_vertex_transitive,
                       is_arc_transitive, commutes_with_group, commutant_basis,
                       commutant_dimension, haar_values, fixed_point_basis,
                       configuration_gap, write_generators, read_generators)
from .lbcs import (Lbcs, Constraint, SatResult, SolutionSpace, QuantumVerdict,
                   QuantumSatReport, make_lbcs, magic_square_system, classical_solve,
                   classical_satisfiable, homogenize, solution_space, rhs_parity,
                   game_graph, arkhipov_lbcs, quantum_satisfiable_verdict,
                   write_lbcs, read_lbcs)
from .construct import (ParityVertex, TransitivityCertificate, WitnessReport,
                        parity_vertices, build_x0, build_x, lift_automorphism,
                        even_subgraph_automorphism, fiber_transporter,
                        certify_vertex_transitive_x0, witness_pair,
                        write_parity_labels)
from .qcert import (MagicUnitaryCandidate, OperatorSolutionCandidate,
                    MagicUnitaryReport, QuantumIsomorphismReport,
                    OperatorSolutionReport, check_magic_unitary,
                    check_quantum_isomorphism, check_operator_solution,
                    mermin_peres_solution, classical_strategy_as_certificate,
                    permutation_candidate, two_projector_magic_unitary,
                    write_magic_unitary, read_magic_unitary,
                    write_operator_solution, read_operator_solution)

__version__ = "0.1.0"
