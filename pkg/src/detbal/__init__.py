"""Detailed-balance diagnostics for open quantum systems thermalized by a dilute gas.

A point-contact scattering model gives exact T matrices, the T matrices give
thermal rates and the detailed-balance ratios ``I(k, l)``, and the rates drive a
Pauli master equation whose currents and entropy production can be inspected.
"""

from .errors import *  # noqa: F401,F403
from .model_3qd import (TriangleModel, coupling_from_sites, eigenenergies, reference_triangle,
                        general_site_coupling, hamiltonian_3qd)
from .pauli import (PauliGenerator, PopulationState, build_generator, evolve, gibbs_state,
                    stationary_state)
from .scattering import (ChannelSet, CouplingMatrix, solve_channel_amplitudes, t_element,
                         t_matrix)
from .thermal_rates import RateTable, ThermalBath, dbe_identity_check, i_ratio, rate_matrix
from .thermo import (CurrentSet, EntropyReport, entropy_decomposition, entropy_production,
                     heat_currents, probability_currents, thermalization_residuals)

__version__ = "0.1.0"
