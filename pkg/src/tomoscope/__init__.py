from tomoscope.states import (
    ModePairState,
    cat_state,
    coherent_characteristic,
    coherent_state,
    direct_characteristic,
    squeezed_state,
    vacuum_state,
)
from tomoscope.protocol import (
    BRANCHES,
    CharGrid,
    CharSample,
    SpinMotionalState,
    apply_protocol,
    characteristic_point,
    direct_grid,
    joint_sz,
    reconstruct,
    sample,
    symmetric_axis,
)
from tomoscope.wigner import WignerGrid, com_density, edge_weight, wigner_direct, wigner_from_char
