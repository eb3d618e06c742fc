from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.common.api import all_passed, check_entry, require_fields, require_list
from src.common.protocol import Scalar, parse_scalar, render_scalar
from src.geom2d import ORIGIN, ConvexPolygon, GeometryError, Vec2, cones_at_vertex, nesting_margin, nesting_sup

log = logging.getLogger(__name__)


class SketchError(ValueError):
    pass


@dataclass(frozen=True)
class Mark:
    """Vertex V of level `level` whose gradient direction is prescribed as u."""

    k: int
    level: int
    vertex: Vec2
    u: Vec2

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "level": self.level, "vertex": self.vertex.to_json(), "u": self.u.to_json()}

    @staticmethod
    def from_any(data: Dict[str, Any]) -> "Mark":
        require_fields(data, ["k", "level", "vertex", "u"])
        return Mark(int(data["k"]), int(data["level"]), Vec2.from_any(data["vertex"]), Vec2.from_any(data["u"]))


@dataclass(frozen=True)
class SketchSpec:
    polytopes: Tuple[ConvexPolygon, ...]
    marks: Tuple[Mark, ...]
    margins: Tuple[Scalar, ...]
    domain: ConvexPolygon
    # smoothness degree the construction targets; metadata only
    smoothness: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "polytopes", tuple(self.polytopes))
        object.__setattr__(self, "marks", tuple(self.marks))
        object.__setattr__(self, "margins", tuple(self.margins))
        if not self.polytopes:
            raise SketchError("sketch needs at least one polytope")
        if len(self.margins) != len(self.polytopes):
            raise SketchError(
                f"need one margin per level: {len(self.margins)} margins for {len(self.polytopes)} polytopes"
            )

    @property
    def depth(self) -> int:
        """Index of the innermost level."""
        return len(self.polytopes) - 1

    def marks_at(self, level: int) -> List[Mark]:
        return [m for m in self.marks if m.level == level]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "polytopes": [p.to_dict() for p in self.polytopes],
            "marks": [m.to_dict() for m in self.marks],
            "margins": [render_scalar(d) for d in self.margins],
            "domain": self.domain.to_dict(),
            "smoothness": self.smoothness,
        }

    @staticmethod
    def from_any(data: Dict[str, Any]) -> "SketchSpec":
        require_fields(data, ["polytopes", "marks", "margins", "domain"])
        return SketchSpec(
            polytopes=tuple(ConvexPolygon.from_dict(p) for p in require_list(data, "polytopes", min_len=1)),
            marks=tuple(Mark.from_any(m) for m in require_list(data, "marks")),
            margins=tuple(parse_scalar(d) for d in require_list(data, "margins", min_len=1)),
            domain=ConvexPolygon.from_dict(data["domain"]),
            smoothness=int(data.get("smoothness", 1)),
        )


@dataclass
class ValidationReport:
    entries: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all_passed(self.entries)

    def failed(self) -> List[str]:
        return [e["name"] for e in self.entries if not e["passed"]]

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "entries": list(self.entries)}


def _check_admissible(spec: SketchSpec) -> Dict[str, Any]:
    for m in spec.marks:
        if not (0 <= m.level < len(spec.polytopes)):
            return check_entry("admissible_directions", False, k=m.k, level=m.level, reason="no such level")
        p = spec.polytopes[m.level]
        try:
            _, _, cone = cones_at_vertex(p, m.vertex)
        except GeometryError as e:
            return check_entry("admissible_directions", False, k=m.k, level=m.level, reason=str(e))
        if m.u.is_zero() or not cone.contains(m.u):
            return check_entry(
                "admissible_directions", False, k=m.k, level=m.level, u=list(m.u.to_tuple())
            )
    return check_entry("admissible_directions", True, marks=len(spec.marks))


def _check_nesting(spec: SketchSpec) -> Dict[str, Any]:
    worst: Optional[Tuple[float, int]] = None
    for level in range(len(spec.polytopes) - 1):
        try:
            margin = nesting_margin(spec.polytopes[level], spec.polytopes[level + 1])
        except GeometryError:
            # reported by the origin check
            continue
        delta = float(spec.margins[level])
        if margin < delta or margin <= 0.0:
            return check_entry("strict_nesting", False, level=level, margin=margin, delta=delta)
        slack = margin - delta
        if worst is None or slack < worst[0]:
            worst = (slack, level)
    if worst is None:
        return check_entry("strict_nesting", True)
    return check_entry("strict_nesting", True, tightest_level=worst[1], slack=worst[0])


def _check_margins(spec: SketchSpec) -> Dict[str, Any]:
    for level, d in enumerate(spec.margins):
        if not (0 < d < 1):
            return check_entry("margins_in_range", False, level=level, delta=float(d))
    return check_entry("margins_in_range", True)


def _check_origin(spec: SketchSpec) -> Dict[str, Any]:
    for level, p in enumerate(spec.polytopes):
        if p.degenerate or not p.contains(ORIGIN, strict=True):
            return check_entry("origin_interior", False, level=level)
    return check_entry("origin_interior", True)


def _check_domain(spec: SketchSpec) -> Dict[str, Any]:
    for v in spec.polytopes[0].vertices:
        if not spec.domain.contains(v, strict=True):
            return check_entry("domain_contains_outer_level", False, vertex=v.to_json())
    return check_entry("domain_contains_outer_level", True)


def validate_sketch(spec: SketchSpec) -> ValidationReport:
    """One entry per hypothesis; failures are entries with a witness, never exceptions."""
    report = ValidationReport(
        [
            _check_admissible(spec),
            _check_nesting(spec),
            _check_origin(spec),
            _check_margins(spec),
            _check_domain(spec),
        ]
    )
    if not report.passed:
        log.info("sketch validation failed: %s", ", ".join(report.failed()))
    return report


def mark_pins(spec: SketchSpec, level: int) -> Dict[int, Vec2]:
    """Vertex index -> unit direction for the marks of one level."""
    pins: Dict[int, Vec2] = {}
    p = spec.polytopes[level]
    for m in spec.marks_at(level):
        i = p.index_of(m.vertex)
        if i is None:
            raise SketchError(f"mark {m.k} is not a vertex of level {level}")
        u = m.u.unit()
        prev = pins.get(i)
        if prev is not None and (prev - u).norm() > 1e-12:
            raise SketchError(f"conflicting directions at vertex {i} of level {level}")
        pins[i] = u
    return pins


def nested_spec(polys: Sequence[ConvexPolygon], domain: ConvexPolygon, marks: Sequence[Mark] = ()) -> SketchSpec:
    """Margins half the exact nesting supremum of each pair (capped at 1/2); the last one repeats."""
    half = parse_scalar("1/2")
    margins: List[Scalar] = []
    for level in range(len(polys) - 1):
        try:
            s = nesting_sup(polys[level], polys[level + 1])
        except GeometryError as e:
            raise SketchError(f"level {level}: {e}") from e
        if s <= 0:
            raise SketchError(f"levels not strictly nested at level {level}")
        margins.append(min(s / 2, half))
    margins.append(margins[-1] if margins else half)
    return SketchSpec(tuple(polys), tuple(marks), tuple(margins), domain)


def homothetic_spec(
    base: ConvexPolygon, scales: Sequence[Scalar], domain: ConvexPolygon, marks: Sequence[Mark] = ()
) -> SketchSpec:
    """Levels λ_ℓ·base."""
    return nested_spec([base.scaled(s) for s in scales], domain, marks)
