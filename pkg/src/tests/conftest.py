import os

import hypothesis
import numpy as np
import pytest

from beamforge.geometry import BeamGeometry, load_layout
from config import get_settings
from relmode.spectrum import diagonalize_relative

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(scope="session")
def settings():
    return get_settings()


@pytest.fixture(scope="session")
def geometry(settings):
    """End Matter trap: W = 700 nm, ωx = 2π·140 kHz, εx = 0.041, εy = 0.018, εz = 0.014."""
    return BeamGeometry.from_settings(settings)


@pytest.fixture(scope="session")
def three_beam(settings):
    return load_layout("three_beam", settings.LAYOUTS_DIR)


@pytest.fixture(scope="session")
def five_beam(settings):
    return load_layout("five_beam", settings.LAYOUTS_DIR)


@pytest.fixture(scope="session")
def harmonic_spectrum(settings):
    return diagonalize_relative(0.0, settings.N_REL, n_expansion=settings.N_EXPANSION)


@pytest.fixture(scope="session")
def squeezing_spectrum(settings):
    return diagonalize_relative(settings.U_PRIME_SQUEEZING, settings.N_REL, n_expansion=settings.N_EXPANSION)


@pytest.fixture(scope="session")
def displacement_spectrum(settings):
    return diagonalize_relative(settings.U_PRIME_DISPLACEMENT, settings.N_REL, n_expansion=settings.N_EXPANSION)
