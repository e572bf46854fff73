"""pinchlab: a desk-scale numerical laboratory for curvature pinching,
cusp ODE analysis, and Einstein metric perturbation on rotationally
symmetric 3-metrics."""

from .backend import backend_name
from .cusp import OdeBlock, TrivialEinsteinVariation
from .lattices import Lattice2D
from .metrics import CurvatureData, SymRadialTensor, WarpedMetric, curvature_of_warped
from .models import BumpProfile, CutoffProfile, TubeGeometry
from .norms import NormConfig, NormReport
from .reports import report_schema_version
from .uniform import TorusConformalGrid

__version__ = "0.1.0"

__all__ = [
    "BumpProfile",
    "CurvatureData",
    "CutoffProfile",
    "Lattice2D",
    "NormConfig",
    "NormReport",
    "OdeBlock",
    "SymRadialTensor",
    "TorusConformalGrid",
    "TrivialEinsteinVariation",
    "TubeGeometry",
    "WarpedMetric",
    "backend_name",
    "curvature_of_warped",
    "report_schema_version",
    "__version__",
]
