class SimulationError(Exception):
    """Base error of the simulator; `exit_code` is what the CLI returns for it."""

    exit_code: int = 1


class ConfigurationError(SimulationError):
    exit_code = 1


class InfeasibleDepthError(SimulationError):
    """A trap depth becomes negative somewhere in the schedule."""

    exit_code = 2

    def __init__(self, message: str, time: float | None = None, beam: int | None = None):
        super().__init__(message)
        self.time = time
        self.beam = beam


class BasisInadequacyError(SimulationError):
    exit_code = 3


class SingularLayoutError(SimulationError):
    exit_code = 2


class SeriesConvergenceError(SimulationError):
    exit_code = 1


class ResonanceError(SimulationError):
    exit_code = 1


class UnsupportedGateError(SimulationError):
    exit_code = 1


class IntegrationError(SimulationError):
    exit_code = 4


class NormDriftError(IntegrationError):

    def __init__(self, message: str, trace: list[tuple[int, float]] | None = None):
        super().__init__(message)
        self.trace = trace or []


class CutoffPopulationError(BasisInadequacyError):
    """Population on the top COM Fock levels above the strict threshold."""


class AccuracyCheckError(IntegrationError):
    pass
