from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from src.common.protocol import FormatError, Scalar, parse_scalar, render_scalar


class GeometryError(ValueError):
    pass


def is_exact(s: Scalar) -> bool:
    return isinstance(s, (int, Fraction)) and not isinstance(s, bool)


@dataclass(frozen=True)
class Vec2:
    x: Scalar
    y: Scalar

    def __add__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x - o.x, self.y - o.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def __mul__(self, k: Scalar) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: Scalar) -> "Vec2":
        if is_exact(k) and self.is_exact:
            return Vec2(Fraction(self.x) / k, Fraction(self.y) / k)
        return Vec2(self.x / k, self.y / k)

    def dot(self, o: "Vec2") -> Scalar:
        return self.x * o.x + self.y * o.y

    def cross(self, o: "Vec2") -> Scalar:
        return self.x * o.y - self.y * o.x

    def norm2(self) -> Scalar:
        return self.x * self.x + self.y * self.y

    def norm(self) -> float:
        return math.hypot(float(self.x), float(self.y))

    def perp(self) -> "Vec2":
        # counterclockwise quarter turn
        return Vec2(-self.y, self.x)

    def angle(self) -> float:
        return math.atan2(float(self.y), float(self.x))

    def unit(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise GeometryError("degenerate direction")
        return Vec2(float(self.x) / n, float(self.y) / n)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    @property
    def is_exact(self) -> bool:
        return is_exact(self.x) and is_exact(self.y)

    def to_float(self) -> "Vec2":
        return Vec2(float(self.x), float(self.y))

    def to_tuple(self) -> Tuple[float, float]:
        return (float(self.x), float(self.y))

    def to_array(self) -> np.ndarray:
        return np.array([float(self.x), float(self.y)], dtype=float)

    def lex_key(self) -> Tuple[Scalar, Scalar]:
        return (self.x, self.y)

    def to_json(self) -> List[Any]:
        return [render_scalar(self.x), render_scalar(self.y)]

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"xy": self.to_json()}
        if self.is_exact:
            out["float"] = [float(self.x), float(self.y)]
        return out

    @staticmethod
    def from_any(v: Any) -> "Vec2":
        if isinstance(v, Vec2):
            return v
        if isinstance(v, np.ndarray) and v.shape == (2,):
            return Vec2(float(v[0]), float(v[1]))
        if isinstance(v, dict):
            if "xy" in v:
                return Vec2.from_any(v["xy"])
            if "x" in v and "y" in v:
                return Vec2(parse_scalar(v["x"]), parse_scalar(v["y"]))
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return Vec2(parse_scalar(v[0]), parse_scalar(v[1]))
        raise FormatError(f"invalid point: {v!r}")


def unit_at(theta: float) -> Vec2:
    return Vec2(math.cos(theta), math.sin(theta))


def q(p: int, d: int = 1) -> Fraction:
    return Fraction(p, d)


def qvec(x: Union[int, str, Fraction], y: Union[int, str, Fraction]) -> Vec2:
    return Vec2(Fraction(x), Fraction(y))


E1 = Vec2(Fraction(1), Fraction(0))
E2 = Vec2(Fraction(0), Fraction(1))
ORIGIN = Vec2(Fraction(0), Fraction(0))
