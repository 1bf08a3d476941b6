"""Lagrangian and polysymplectic Hamiltonian dynamics of submanifolds.

Submanifolds of Z are handled as sections of the trivial bundle Q x Z -> Q.
The package provides jet-coordinate charts, a hyper-dual differentiation
engine, variational operators with Noether-identity checks, the Hamiltonian
counterparts, and an integrator for the relativistic particle.
"""

__version__ = "0.1.0"

from .charts import (SecondJet, SectionJet, SplitChart, SubmanifoldJet, TransitionMap,
                     is_regular, lift, project, transform_section_jet,
                     transform_submanifold_jet)
from .errors import (ConfigError, DomainViolation, NotRegularInChart, SamplingExhausted,
                     SingularJacobian, SingularM, StepFailure, SubjetError,
                     UnsupportedDimension)
from .hyperdual import HyperDual
from .models import (ConstantMetric, ModelConfig, build_hamiltonian, build_lagrangian,
                     charged_particle_lagrangian, free_particle_lagrangian,
                     nambu_goto_lagrangian, string_hamiltonian)
from .phase import (HamiltonianModel, PhasePoint, PhaseSecondJet,
                    associated_hamiltonian_residuals, hamilton_residual,
                    hamiltonian_map, hamiltonian_noether_residual, legendre)
from .varcalc import (LagrangianModel, VectorFieldOnZQ, euler_lagrange,
                      first_variation_residual, interaction_density, noether_current,
                      noether_identity_residual, prolong)
