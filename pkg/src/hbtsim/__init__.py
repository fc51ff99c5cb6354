"""Monte Carlo toolkit for single-photon-emitter coincidence measurements.

Simulates an ideal pulsed single-photon emitter observed through a
beamsplitter and two imperfect detectors, and quantifies how background
noise and split asymmetries corrupt the measured zero-lag coincidence ratio
g2(0) used to identify single-photon sources.
"""

from .backend import backend_name
from .correlator import (
    CorrelationResult,
    LagWindow,
    coincidence_counts,
    g2_curve,
    g2_zero_estimate,
    read_correlation_csv,
    write_correlation_csv,
)
from .errors import (
    CapacityError,
    DegenerateDenominatorError,
    EmptySidebandError,
    HbtSimError,
    InvalidParameterError,
    WindowTooLargeError,
)
from .model import (
    DetectorRates,
    SimParams,
    analytic_g2_zero,
    derive_rates,
    fock_g2,
)
from .streams import (
    MAX_PULSES,
    PhotonStreams,
    RandomDraws,
    draw_uniforms,
    generate_streams,
    poisson_reference_streams,
    read_streams_csv,
    write_streams_csv,
)
from .sweep import (
    AxisSpec,
    CellFailure,
    SweepGrid,
    extract_contour,
    fill_grid_analytic,
    mix_seed,
    read_contour_csv,
    read_grid_csv,
    run_sweep,
    write_contour_csv,
    write_grid_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AxisSpec",
    "CapacityError",
    "CellFailure",
    "CorrelationResult",
    "DegenerateDenominatorError",
    "DetectorRates",
    "EmptySidebandError",
    "HbtSimError",
    "InvalidParameterError",
    "LagWindow",
    "MAX_PULSES",
    "PhotonStreams",
    "RandomDraws",
    "SimParams",
    "SweepGrid",
    "WindowTooLargeError",
    "analytic_g2_zero",
    "backend_name",
    "coincidence_counts",
    "derive_rates",
    "draw_uniforms",
    "extract_contour",
    "fill_grid_analytic",
    "fock_g2",
    "g2_curve",
    "g2_zero_estimate",
    "generate_streams",
    "mix_seed",
    "poisson_reference_streams",
    "read_contour_csv",
    "read_correlation_csv",
    "read_grid_csv",
    "read_streams_csv",
    "run_sweep",
    "write_contour_csv",
    "write_correlation_csv",
    "write_grid_csv",
    "write_streams_csv",
]
