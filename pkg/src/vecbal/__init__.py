"""vecbal: constructive vector balancing inside convex bodies.

Given vectors v_1..v_n and a shift t in their zonotope, the package finds
sign vectors chi with V chi - t inside a target convex body of Gaussian
measure at least 1/2, via a subgaussian random-walk sampler for symmetric
bodies, a measure-recentering procedure for asymmetric ones, and a fully
deterministic body-centric descent.  A statistical harness estimates
subgaussian parameters and Monte-Carlo Gaussian measures.
"""

from .bodies import (
    BarycenterEstimate,
    ConvexBody,
    GaugeResult,
    MeasureEstimate,
    ball,
    barycenter,
    body_from_doc,
    convexity_spot_check,
    cube,
    gauge_norm,
    gaussian_measure,
    halfspace,
    intersect,
    load_body,
    restrict,
    save_body,
    scaled,
    shifted,
    symmetrize,
    symmetry_spot_check,
    whole_space,
)
from .errors import (
    BudgetError,
    ContractViolation,
    DegenerateFaceError,
    NotPSDError,
    NumericalError,
    PreconditionError,
    RejectionExhaustedError,
    RestartBudgetError,
    SingularSystemError,
    VecbalError,
)
from .komlos import KomlosSolution, psd_factor, solve_komlos
from .pipelines import (
    AsymPipelineConfig,
    AsymReport,
    BodyCentricConfig,
    BodyCentricTrace,
    color_asymmetric,
    color_body_centric,
)
from .recenter import RecenterResult, recenter
from .subgauss import (
    SubgaussReport,
    coverage_crossing_scale,
    coverage_test,
    estimate_subgaussian,
    laplace_certificate,
)
from .walk import SigmaCache, WalkParams, WalkStrategy, WalkTrace, sample_coloring, walk_params
from .zonotope import (
    FaceState,
    FractionalColoring,
    VectorSystem,
    descend_face,
    dual_basis,
    lift,
    load_instance,
    min_norm_boundary_point,
    ray_exit,
    reduce_to_independent,
    save_instance,
)

__version__ = "0.1.0"
