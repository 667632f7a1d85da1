from dynamics.basis import (
    MotionalState,
    Observables,
    ProductBasis,
    annihilation,
    coherent_amplitudes,
    com_position_power,
    cutoff_population,
    observables,
)
from dynamics.assembly import (
    DriveAssembly,
    OperatorCache,
    OperatorTerm,
    assemble,
    expand_symmetric_power,
    order_operator,
)
from dynamics.propagator import (
    PropagationDiagnostics,
    PropagatorConfig,
    SplittingPropagator,
    gate_fidelity,
    propagate,
)
