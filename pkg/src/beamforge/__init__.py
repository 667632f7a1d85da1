from beamforge.geometry import BeamGeometry, TrapLayout, load_layout
from beamforge.coefficients import (
    CoefficientMatrix,
    axial_coefficient,
    build_coeff_matrix,
    g_integral,
    sixth_order_residual,
    taylor_coefficients_by_contour,
    transverse_averaged_beam,
)
from beamforge.depths import (
    DepthSchedule,
    Tone,
    Waveform,
    base_depths_for,
    build_schedule,
    modulation_limit,
    solve_depths_general,
    solve_depths_symmetric,
    symmetric_depths,
)
from beamforge.potential import PotentialValue, effective_potential
