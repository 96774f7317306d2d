"""Capacities of covariant quantum channels over finite abelian phase spaces."""

__version__ = "0.1.0"

from .spectral import (hermitian_eigensystem, von_neumann_entropy,
                       random_pure_state, random_unitary, random_density_matrix)
from .weyl import (FiniteAbelianGroup, PhaseSpacePoint, PhaseSpaceDistribution,
                   CharacteristicFunction, make_group, duality_pairing,
                   weyl_operator, weyl_operators, composition_phase,
                   conjugation_phase, characteristic_from_distribution,
                   distribution_from_characteristic, is_positive_definite)
from .channel import (QuantumChannel, channel_from_kraus, identity_channel,
                      kraus_from_choi, weyl_channel, werner_holevo, depolarizing,
                      completely_depolarizing, random_channel,
                      channel_characteristic, is_covariant, is_bistochastic,
                      tensor, dilation_sample, tensor_operator_matrix)
from .capacity import (Ensemble, OptimizationResult, InequalityReport,
                       entropy_exchange, holevo_quantity, min_output_entropy,
                       orbit_ensemble, one_shot_capacity_covariant,
                       mutual_information, ea_capacity, pure_decompositions,
                       check_eex, check_ea_bound, multiplicativity_probe)
