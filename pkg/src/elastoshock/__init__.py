"""Stability classification of planar shocks in isentropic neo-Hookean elastodynamics."""

from .analytic import (
    CircleCoefficients,
    StabilityReport,
    Verdict,
    circle_coefficients,
    classify,
    classify_pointwise,
    special_conditions,
    stability_margin,
    margin_2d,
)
from .eos import EquationOfState, evaluate, is_convex, make_polytropic, make_tabulated
from .errors import (
    AdmissibilityError,
    DegenerateFrequencyError,
    InternalConsistencyError,
    NoPhysicalShockError,
    ParameterError,
)
from .lax import characteristic_speeds, check_lax_planar, check_lax_pointwise
from .spectral import lambda_plus, lopatinski_values, scan_stability, transition_points
from .states import (
    DimensionlessShock,
    MaterialState,
    PlanarShockPair,
    SurfacePointData,
    gas_limit,
    nondimensionalize,
    solve_downstream,
)

__version__ = "0.1.0"
