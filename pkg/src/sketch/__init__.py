from __future__ import annotations

from src.sketch.objective import (
    Evaluation,
    Objective,
    SegmentDistanceObjective,
    SketchObjective,
    ZeroObjective,
    as_xy,
    build_objective,
    lipschitz_estimate,
    midpoint_convexity,
)
from src.sketch.spec import (
    Mark,
    SketchError,
    SketchSpec,
    ValidationReport,
    homothetic_spec,
    mark_pins,
    nested_spec,
    validate_sketch,
)

__all__ = [
    "Evaluation",
    "Mark",
    "Objective",
    "SegmentDistanceObjective",
    "SketchError",
    "SketchObjective",
    "SketchSpec",
    "ValidationReport",
    "ZeroObjective",
    "as_xy",
    "build_objective",
    "homothetic_spec",
    "lipschitz_estimate",
    "mark_pins",
    "nested_spec",
    "midpoint_convexity",
    "validate_sketch",
]
