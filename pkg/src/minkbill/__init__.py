"""EHZ capacities, systolic ratios and Minkowski billiards for products of convex polygons."""

from .capacity import (
    CapacityResult,
    PolyCurve,
    ehz_capacity,
    interpolation_sweep,
    min_curve_exact,
    min_curve_grid,
    systolic_ratio,
    tlength,
    verify_billiard,
)
from .errors import (
    BilliardError,
    CornerHit,
    InternalError,
    InvalidArgument,
    InvalidBody,
    NoCrossing,
    NotOnBoundary,
    PreconditionViolated,
    UndefinedCone,
    UnfoldUnsupported,
)
from .flow import FlowState, Trajectory, length_classes, simulate, step, unfold
from .geometry import (
    Cone,
    Polygon2,
    area,
    gauge,
    minkowski_combine,
    normal_cone,
    polar,
    regular_polygon,
    support,
    transform,
    translatable_into_interior,
)
from .products import (
    ProductSpec,
    construct_KnTn,
    mc_volume,
    sys_product2,
    sys_product_1_inf,
    volume_factor,
)

__version__ = "0.1.0"
