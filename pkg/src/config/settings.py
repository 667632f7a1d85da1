import math
import os
from pathlib import Path

from pydantic_settings import BaseSettings

RB87_MASS_KG = 86.909180527 * 1.66053906660e-27


class Settings(BaseSettings):
    BASE_DIR: Path = Path(__file__).parent.parent
    PATH_TO_DB: str = str(BASE_DIR / "database" / "source" / "runs.db")
    LAYOUTS_DIR: str = str(BASE_DIR / "layouts")
    OUTPUT_DIR: str = str(BASE_DIR.parent / "results")
    LOG_LEVEL: str = "INFO"

    OMEGA_X: float = 2.0 * math.pi * 140e3
    WAIST: float = 700e-9
    ATOM_MASS: float = RB87_MASS_KG
    EPS_X: float = 0.041
    EPS_Y: float = 0.018
    EPS_Z: float = 0.014

    U_PRIME_DISPLACEMENT: float = 0.86
    U_PRIME_SQUEEZING: float = 0.36

    N_REL: int = 64
    N_EXPANSION: int = 2048
    N_REL_DYN: int = 6
    N_COM: int = 48
    N_COM_SQUEEZING: int = 24
    K_SIM: int = 14

    STEPS_PER_PERIOD: int = 64
    INTEGRATOR_ORDER: int = 4
    NORM_TOLERANCE: float = 1e-10
    CUTOFF_WARNING: float = 1e-6
    STEP_NORM_LIMIT: float = 0.2

    LAMBDA_MIN: float = 1e-3
    LAMBDA_POINTS_PER_DECADE: int = 24

    N_TOMOGRAPHY: int = 60
    TOMOGRAPHY_EXTENT: float = 6.0
    TOMOGRAPHY_SPACING: float = 0.25


class TestingSettings(Settings):
    PATH_TO_DB: str = ":memory:"
    N_EXPANSION: int = 1024


def get_settings() -> Settings:
    """
    Retrieve the application settings based on the environment.

    This function checks the `ENVIRONMENT` environment variable to determine
    which settings class to use. If `ENVIRONMENT` is set to `"testing"`, it
    returns an instance of `TestingSettings`. Otherwise, it defaults to `Settings`.

    :return: An instance of the appropriate settings class.
    :rtype: Settings
    """
    environment = os.getenv("ENVIRONMENT", "developing")
    if environment == "testing":
        return TestingSettings()
    return Settings()
