"""Non-isotropic persistent homology: orientation recovery from shifts of
persistence diagrams under direction-scaled metrics."""

from .density import DensityCurve, find_peak, kde, scott_bandwidth
from .errors import (
    DataError,
    DegenerateDistributionError,
    InvalidProbeError,
    InvalidWeightingError,
    NiphError,
    PipelineError,
    ResourceBudgetError,
)
from .estimators import NiphOrientation, PcaOrientation
from .geometry import (
    ProbeSpec,
    anisotropic_distance,
    distance_matrix,
    load_cloud_csv,
    outlier_dissimilarity,
    rotate_cloud,
    save_cloud_csv,
    scale_points,
)
from .model import (
    FitResult,
    PeakObservation,
    angular_error,
    expected_peak_0d,
    expected_peak_1d,
    fit_parameters,
    pca_orientation,
)
from .network import LineNetwork, load_geojson, sample_network
from .persistence import (
    PersistenceDiagram,
    PersistencePair,
    WeightedDeaths,
    death_distribution,
    death_edge_orientations,
    vr_persistence_0,
    vr_persistence_1,
)
from .pipeline import NiphConfig, NiphReport, ProbePlan, run_niph
from .synth import GridSpec, ShapeFieldSpec, gen_grid, gen_shape_field
from .transport import (
    MultShiftDiagram,
    TransportPlan,
    mult_shifts,
    ot_1d,
    shift_diagram,
    sinkhorn_1d,
    transport_cost,
)

__version__ = "0.1.0"
