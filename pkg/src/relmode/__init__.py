from relmode.interaction import (
    InteractionParams,
    interaction_matrix_element,
    perturbative_coefficients,
    perturbative_energies,
)
from relmode.spectrum import (
    RelativeSpectrum,
    anharmonicity_scan,
    diagonalize_relative,
    exact_energies,
    interaction_matrix,
    optimal_anharmonicity,
)
from relmode.elements import (
    QubitCoefficients,
    completeness_residual,
    dressed_power_elements,
    harmonic_power_matrix,
    qubit_coefficients,
    spectrum_export,
)
