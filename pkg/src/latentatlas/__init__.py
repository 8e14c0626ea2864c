"""latentatlas: local-PCA chart atlases over high-dimensional point clouds.

Estimate intrinsic dimensionality with multiscale local SVD, cover a cloud
with capped-dimension local-PCA charts, lay the chart graph out in 2D, map
chart coordinates back to valid ambient vectors, and serve the whole thing
over HTTP for interactive exploration.
"""

from .atlas import (
    Atlas,
    Chart,
    ambient_to_chart,
    build_atlas,
    chart_to_ambient,
    cover,
    fit_chart,
    load_atlas,
    nearest_chart,
    save_atlas,
)
from .errors import (
    DegenerateEstimateError,
    EmptyScaleError,
    InputError,
    InsufficientNeighborhoodError,
    LatentAtlasError,
    ParameterError,
    ParseError,
)
from .evaluation import (
    ErrorDistribution,
    GlobalBasis,
    PdistReport,
    chart_locality_report,
    global_pca,
    import_embedding,
    pdist_report,
    reconstruction_errors,
)
from .geometry import (
    NeighborGraph,
    PointCloud,
    cloud_checksum,
    geodesic_distances,
    knn_graph,
    load_point_cloud,
    save_point_cloud,
)
from .layout import LayoutNode, compute_layout, force_layout, resolve_collisions
from .msvd import (
    DimEstimate,
    ScaleGrid,
    SpectrumTable,
    average_spectrum,
    build_scale_grid,
    compute_r_max,
    estimate_dimension,
    estimate_intrinsic_dim,
    export_spectrum,
    import_spectrum,
    local_spectrum,
)
from .synth import GeneratorSpec, generate

__version__ = "0.1.0"
SCHEMA_VERSION = "1"

__all__ = [
    "Atlas",
    "Chart",
    "DegenerateEstimateError",
    "DimEstimate",
    "EmptyScaleError",
    "ErrorDistribution",
    "GeneratorSpec",
    "GlobalBasis",
    "InputError",
    "InsufficientNeighborhoodError",
    "LatentAtlasError",
    "LayoutNode",
    "NeighborGraph",
    "ParameterError",
    "ParseError",
    "PdistReport",
    "PointCloud",
    "ScaleGrid",
    "SpectrumTable",
    "ambient_to_chart",
    "average_spectrum",
    "build_atlas",
    "build_scale_grid",
    "chart_locality_report",
    "chart_to_ambient",
    "cloud_checksum",
    "compute_layout",
    "compute_r_max",
    "cover",
    "estimate_dimension",
    "estimate_intrinsic_dim",
    "export_spectrum",
    "fit_chart",
    "force_layout",
    "generate",
    "geodesic_distances",
    "global_pca",
    "import_embedding",
    "import_spectrum",
    "knn_graph",
    "load_atlas",
    "load_point_cloud",
    "local_spectrum",
    "nearest_chart",
    "pdist_report",
    "reconstruction_errors",
    "resolve_collisions",
    "save_atlas",
    "save_point_cloud",
]
