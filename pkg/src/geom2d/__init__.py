from __future__ import annotations

from src.geom2d.body import (
    Body,
    OffsetLimitError,
    hausdorff,
    minkowski_combination,
    minkowski_pairs,
    nesting_margin,
    nesting_sup,
    offset_limit,
    rounded_body,
    rounding_bound,
    support,
    support_gap_range,
    support_ratio_range,
    support_values,
)
from src.geom2d.cones import ConeSector, cones_at_vertex, lmo_cone, normal_cone_polar_check
from src.geom2d.polygon import ConvexPolygon, aligned, angle_at, convex_hull, parallel, same_angle
from src.geom2d.vec import E1, E2, ORIGIN, GeometryError, Vec2, q, qvec, unit_at

__all__ = [
    "Body",
    "ConeSector",
    "ConvexPolygon",
    "E1",
    "E2",
    "GeometryError",
    "ORIGIN",
    "OffsetLimitError",
    "Vec2",
    "aligned",
    "angle_at",
    "cones_at_vertex",
    "convex_hull",
    "hausdorff",
    "lmo_cone",
    "minkowski_combination",
    "minkowski_pairs",
    "nesting_margin",
    "nesting_sup",
    "normal_cone_polar_check",
    "offset_limit",
    "parallel",
    "q",
    "qvec",
    "rounded_body",
    "rounding_bound",
    "same_angle",
    "support",
    "support_gap_range",
    "support_ratio_range",
    "support_values",
    "unit_at",
]
