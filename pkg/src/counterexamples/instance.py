from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.common.protocol import Scalar, render_scalar
from src.fw import SPECIFIED, LmoPolicy, StepStrategy, minimizer_set
from src.geom2d import ConeSector, ConvexPolygon, GeometryError, Vec2
from src.sketch import Objective, SegmentDistanceObjective, SketchSpec, ZeroObjective, build_objective

log = logging.getLogger(__name__)

Reference = Callable[[int], List[Vec2]]

# constant of the closed-loop displacement argument
CLOSED_LOOP_C = 1.0 - math.sqrt(13.0 / 14.0)
DISPLACEMENT_THRESHOLD = Fraction(3, 26)


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class CertificateTemplate:
    """Thresholds the analysis layer certifies a run against.

    `window` is an absolute number of iterations; when `window_fraction` is
    set, the window is that fraction of the horizon instead.
    """

    epsilon: float
    window: int = 1
    window_fraction: Optional[float] = None
    band_half_width: Fraction = Fraction(1, 4)
    displacement_threshold: Fraction = DISPLACEMENT_THRESHOLD
    expect_oscillation: bool = True
    min_displacements: int = 0
    # exact rational references grow fast under closed-loop steps
    reference_steps: int = 50
    c: float = CLOSED_LOOP_C

    def window_for(self, horizon: int) -> int:
        if self.window_fraction is None:
            return self.window
        return max(1, int(self.window_fraction * horizon))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "window": self.window,
            "window_fraction": self.window_fraction,
            "band_half_width": render_scalar(self.band_half_width),
            "displacement_threshold": render_scalar(self.displacement_threshold),
            "expect_oscillation": self.expect_oscillation,
            "min_displacements": self.min_displacements,
            "reference_steps": self.reference_steps,
            "c": self.c,
        }


@dataclass(frozen=True)
class StripLevel:
    k: int
    E: Vec2
    F: Vec2
    I: Vec2
    J: Vec2
    H: Vec2
    G: Vec2

    def entry_strip(self) -> ConvexPolygon:
        """conv{E, F, J, I}: the band an iterate must cross before falling below H."""
        return ConvexPolygon.hull([self.E, self.F, self.J, self.I])

    def lmo_strip(self) -> ConvexPolygon:
        return ConvexPolygon.hull([self.E, self.F, self.G, self.H])

    @property
    def target(self) -> Vec2:
        return Vec2(Fraction(-1 if self.k % 2 == 0 else 1), Fraction(0))

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, **{n: getattr(self, n).to_json() for n in ("E", "F", "I", "J", "H", "G")}}


@dataclass(frozen=True)
class Ce3Strips:
    K: int
    levels: Tuple[StripLevel, ...]

    @staticmethod
    def build(K: int, n: int) -> "Ce3Strips":
        out = []
        for k in range(n):
            s = Fraction(2) ** (K - k - 1)
            left = Fraction(-1 if k % 2 == 0 else 1)
            out.append(
                StripLevel(
                    k,
                    E=Vec2(left, Fraction(7, 4) * s),
                    F=Vec2(-left, Fraction(7, 4) * s),
                    I=Vec2(left, Fraction(13, 8) * s),
                    J=Vec2(-left, Fraction(13, 8) * s),
                    H=Vec2(left, Fraction(5, 4) * s),
                    G=Vec2(-left, Fraction(5, 4) * s),
                )
            )
        return Ce3Strips(K, tuple(out))

    def __len__(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> StripLevel:
        return self.levels[k]

    def to_dict(self) -> Dict[str, Any]:
        return {"K": self.K, "levels": [s.to_dict() for s in self.levels]}


@dataclass(frozen=True)
class Instance:
    name: str
    C: ConvexPolygon
    spec: Optional[SketchSpec]
    strategy: str
    x0: Vec2
    solution_set: ConvexPolygon
    template: CertificateTemplate
    reference: Optional[Reference] = field(default=None, compare=False, repr=False)
    strips: Optional[Ce3Strips] = None
    oracle: LmoPolicy = SPECIFIED
    # "sketch", "zero" or "segment_distance"
    objective_kind: str = "sketch"
    L: Optional[float] = None
    demo: bool = False
    allowed: Tuple[str, ...] = ()
    notes: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.C.contains(self.x0, tol=1e-12):
            raise ConstructionError(f"{self.name}: start point {self.x0.to_tuple()} is not in the constraint set")

    @property
    def depth(self) -> int:
        return self.spec.depth if self.spec is not None else 0

    def faithful_horizon(self, T: int) -> int:
        """Steps the truncated sketch reproduces: level k is reached at step k when a reference exists."""
        if self.spec is not None and self.reference is not None:
            return min(T, self.spec.depth)
        return T

    def accepts(self, kind: str) -> bool:
        return not self.allowed or kind in self.allowed

    def make_objective(self, r_scale: float = 1e-4, eta0: float = 1.0) -> Objective:
        if self.objective_kind == "zero":
            return ZeroObjective()
        if self.objective_kind == "segment_distance":
            a, b = self.solution_set.vertex(0), self.solution_set.vertex(1)
            return SegmentDistanceObjective(a.to_float(), b.to_float())
        if self.spec is None:
            raise ConstructionError(f"{self.name}: no sketch to build an objective from")
        return build_objective(self.spec, r_scale=r_scale, eta0=eta0)

    def step_strategy(self, kind: Optional[str] = None, L: Optional[float] = None, tol: float = 1e-12) -> StepStrategy:
        kind = kind or self.strategy
        if kind == "closed":
            value = L if L is not None else self.L
            if value is None:
                raise ConstructionError(f"{self.name}: closed-loop strategy needs L")
            return StepStrategy.closed(value)
        if kind == "linesearch":
            return StepStrategy.linesearch(tol)
        return StepStrategy(kind)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "C": self.C.to_dict(),
            "spec": self.spec.to_dict() if self.spec is not None else None,
            "strategy": self.strategy,
            "L": self.L,
            "x0": self.x0.to_json(),
            "solution_set": self.solution_set.to_dict(),
            "template": self.template.to_dict(),
            "strips": self.strips.to_dict() if self.strips is not None else None,
            "oracle": self.oracle.to_dict(),
            "objective": self.objective_kind,
            "demo": self.demo,
            "notes": {k: _jsonable(v) for k, v in self.notes.items()},
        }


def _jsonable(v: Any) -> Any:
    if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
        return render_scalar(v)
    if isinstance(v, Vec2):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_jsonable(w) for w in v]
    return v


def pick_direction(
    k: ConeSector,
    orthogonal_to: Optional[Vec2] = None,
    inside: Optional[ConeSector] = None,
) -> Vec2:
    """A unit direction in K: orthogonal to a vector, the midpoint of K ∩ inside, or the midpoint of K."""
    if orthogonal_to is not None:
        if orthogonal_to.is_zero():
            raise ConstructionError("orthogonality constraint against the zero vector")
        w = orthogonal_to.perp().unit()
        for cand in (w, -w):
            if k.contains(cand):
                return cand
        raise ConstructionError(f"no direction in sector {k.to_dict()} is orthogonal to {orthogonal_to.to_tuple()}")
    if inside is not None:
        s = k.intersect(inside)
        if s is None:
            raise ConstructionError(f"empty intersection of sectors {k.to_dict()} and {inside.to_dict()}")
        return s.midpoint()
    return k.midpoint()


def require_unique_answer(c: ConvexPolygon, u: Vec2, target: Vec2, k: int) -> None:
    ties = minimizer_set(c, u)
    i = c.index_of(target)
    if i is None or ties != [i]:
        raise ConstructionError(f"construction violated at k={k}: oracle answer for u={u.to_tuple()} is not unique at {target.to_tuple()}")


def checked(label: str, ok: bool, k: int) -> None:
    if not ok:
        raise ConstructionError(f"construction violated at k={k}: {label}")


def reference_trajectory(instance: Instance, T: int) -> List[Vec2]:
    """Exact iterates x_0..x_T from the closed-form dynamics, bypassing the objective."""
    if instance.reference is None:
        raise ConstructionError(f"{instance.name}: no closed-form reference; use certificates")
    if T < 0:
        raise ConstructionError("horizon must be >= 0")
    xs = instance.reference(T)
    if len(xs) != T + 1:
        raise ConstructionError(f"{instance.name}: reference produced {len(xs)} points for T={T}")
    return xs


def box(x0: Scalar, y0: Scalar, x1: Scalar, y1: Scalar) -> ConvexPolygon:
    return ConvexPolygon.box(Fraction(x0), Fraction(y0), Fraction(x1), Fraction(y1))


def cone_or_fail(fn: Callable[[], Any], k: int, label: str = "construction violated") -> Any:
    try:
        return fn()
    except (GeometryError, ConstructionError) as e:
        raise ConstructionError(f"{label} at k={k}: {e}") from e
