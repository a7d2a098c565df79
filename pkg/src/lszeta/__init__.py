"""Lie-theoretic structure, semisimple orbital integrals and geodesic-side
Selberg/Ruelle zeta functions for locally symmetric spaces whose fundamental
rank (complex rank of G minus complex rank of K) equals one."""

from .errors import (DeltaNotOne, DimensionBudget, DualityViolation,
                     InputError, InsufficientSamples, LszetaError,
                     MissingCountingConstants, NotInAlgebra, NotInH,
                     NotInvariant, NotMaximalTorus, NotRegular,
                     NumericalError, QuadratureNotConverged,
                     SingularEigenvalue, SingularPoint, TorusMismatch,
                     UnsupportedDeltaOneFactor, UnsupportedFamily)
from .liecore import (ReductiveGroupData, SemisimpleElement, adjoint_action,
                      b_space, bracket, build_group, casimir_trace,
                      centralizer_algebra, delta_invariant,
                      has_noncompact_center, heat_coefficient_traces,
                      identity_element)
from .orbital import (CharacterOnTorus, JGammaEvaluator,
                      NumberOperatorCharacter, OrbitalRequest, OrbitalResult,
                      abelian_orbital_integral, bismut_orbital_integral,
                      build_evaluator, cartan_of_centralizer,
                      closed_form_trace, evaluator_for_hform,
                      gaussian_time_integral,
                      gaussian_time_integral_quadrature, j_gamma,
                      laplace_beltrami_special, selberg_trace_geodesic_side)
from .parabolic import (DeltaOneStructure, LiftedRep, build_structure,
                        casimir_matrix_oracle, casimir_shift,
                        eta_hat_character, fixed_space_dimension,
                        halfdet_from_angles, halfdet_identity,
                        halfdet_identity_element, km_root_data,
                        lambda_traces_from_angles, lift_exterior_powers,
                        n_weighted_p_character, number_supertrace)
from .rootsweyl import (CompactAlgebraData, RootWeylData, VirtualCharacter,
                        bott_euler_ratio, compact_so, compact_so_sum,
                        flag_volume, is_dominant, kostant_check,
                        pi_polynomial, root_system, root_system_from_ads,
                        simultaneous_eigenblocks, torus_nodes,
                        weyl_alternating_sum, weyl_character,
                        weyl_denominator, weyl_dimension,
                        weyl_integrate_algebra)
from .zeta import (CountingConstants, GeodesicClass, LaurentData,
                   SpectrumDataset, TorsionFit, dataset_from_csv,
                   dataset_from_json, dataset_to_csv, dataset_to_json,
                   factorization_residual, laurent_constants, load_spectrum,
                   rescale_dataset, ruelle_zeta, selberg_zeta,
                   synthetic_spectrum, tail_bound, torsion_laurent_relation,
                   xi_eta, xi_eta_tail_bound, xi_rho)

__version__ = "0.1.0"
