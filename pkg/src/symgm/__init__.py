"""Geometric measure of entanglement for symmetrized product states."""
from .constructions import (
    MubSet,
    SicPovm,
    build_mubs,
    dicke_compatibility,
    dicke_gm_bound,
    dicke_state,
    hw_orbit,
    mub_state,
    mub_state_gm,
    qubit_fiducial,
    qutrit_fiducial,
    sic_scan_d3,
    sic_state,
    sic_state_gm,
)
from .estimation import (
    Compatibility,
    GmResult,
    MlResult,
    RankOnePovm,
    additivity_certificate,
    additivity_certify,
    compatibility_general,
    compatibility_qubit,
    gm_lower_bound,
    gm_optimize,
    gm_tensor_product,
    ml_maximize,
    tensor_product_overlap,
)
from .linalg import TOL, Tolerances
from .majorana import MajoranaPoints, half_sphere_check, majorana_extract
from .permanents import DickeCounts, gram, permanent_dicke, permanent_repeated, permanent_ryser
from .states import (
    KetMultiset,
    SymmetricState,
    build_symmetric,
    dense_expand,
    product_overlap,
    symmetric_state,
)

__version__ = "0.1.0"
