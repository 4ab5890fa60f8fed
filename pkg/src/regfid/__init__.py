"""Regularised maximum pure-state input-output fidelity of quantum channels."""

from .channel import (
    Channel,
    adjoint,
    apply,
    compose,
    dominant_eigenpair,
    fidelity,
    fidelity_gradient,
    identity_channel,
    make_channel,
    natural_representation,
    random_channel,
    random_state,
    tensor,
    tensor_power,
)
from .optimize import (
    MaximizationResult,
    OptimizerOptions,
    bb_maximize,
    max_fidelity,
    nu_2,
    nu_infty,
    regularized_fidelity_full,
)
from .pauli import (
    PauliChannel,
    canonicalize,
    crossover_n0,
    epsilon_channel,
    f_tilde_closed,
    nu_infty_closed,
    pauli_to_kraus,
    trial_fidelity_closed,
)
from .symmetric import (
    enumerate_occupations,
    expand,
    max_symmetric_fidelity,
    pair_embedding,
    symmetric_fidelity,
    symmetric_fidelity_gradient,
    symmetric_transfer,
)
from .trial import (
    StatePair,
    build_trial_state,
    channel_pair_coefficients,
    fix_phase,
    trial_dicke_coefficients,
    trial_fidelity,
    trial_fidelity_root,
)

__version__ = "0.1.0"
