from exceptions.errors import (
    SimulationError,
    ConfigurationError,
    InfeasibleDepthError,
    BasisInadequacyError,
    IntegrationError,
    NormDriftError,
    CutoffPopulationError,
    AccuracyCheckError,
    SingularLayoutError,
    SeriesConvergenceError,
    ResonanceError,
    UnsupportedGateError,
)
