from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from src.geom2d import ConvexPolygon, Vec2

log = logging.getLogger(__name__)

MODES = ("specified", "scripted", "adversarial")
TIE_RTOL = 1e-12

Script = Union[Sequence[int], Callable[[int], int]]


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class LmoPolicy:
    """How the oracle answers when several vertices minimize <v, u>.

    specified:   smallest (x, y) among the minimizers; a function of the ray of u.
    scripted:    vertex index script[t], checked against the minimizer set.
    adversarial: the minimizer closest to the previous answer (history dependent).
    """

    mode: str = "specified"
    script: Optional[Script] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise OracleError(f"unknown oracle mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.mode == "scripted" and self.script is None:
            raise OracleError("scripted oracle needs a script")

    @property
    def misspecified(self) -> bool:
        return self.mode != "specified"

    def scripted_index(self, t: int) -> int:
        if callable(self.script):
            return int(self.script(t))
        seq = list(self.script or [])
        if t >= len(seq):
            raise OracleError(f"script exhausted at t={t}")
        return int(seq[t])

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"mode": self.mode}
        if self.label:
            out["script"] = self.label
        elif self.script is not None and not callable(self.script):
            out["script"] = list(self.script)
        return out


SPECIFIED = LmoPolicy()


def minimizer_set(c: ConvexPolygon, u: Vec2) -> List[int]:
    vs = c.as_array()
    un = u.to_array()
    norm = float(np.hypot(un[0], un[1]))
    if norm == 0.0:
        return list(range(c.n))
    vals = vs @ (un / norm)
    scale = max(1.0, float(np.abs(vs).max()))
    best = float(vals.min())
    return [i for i, s in enumerate(vals) if s <= best + TIE_RTOL * scale]


def lmo(
    c: ConvexPolygon,
    u: Vec2,
    policy: LmoPolicy = SPECIFIED,
    t: int = 0,
    previous: Optional[Vec2] = None,
) -> Vec2:
    ties = minimizer_set(c, u)
    if policy.mode == "scripted":
        i = policy.scripted_index(t)
        if not (0 <= i < c.n):
            raise OracleError(f"script violates oracle contract at t={t}: no vertex {i}")
        if i not in ties:
            raise OracleError(f"script violates oracle contract at t={t}: vertex {i} is not a minimizer")
        return c.vertex(i)
    if policy.mode == "adversarial" and previous is not None and len(ties) > 1:
        p = previous.to_float()
        i = min(ties, key=lambda k: ((c.vertex(k).to_float() - p).norm(), c.vertex(k).lex_key()))
        return c.vertex(i)
    i = min(ties, key=lambda k: c.vertex(k).lex_key())
    return c.vertex(i)


def doubling_blocks(t: int) -> int:
    """Vertex 1 on blocks [2^j − 1, 2^{j+1} − 1) with j even, vertex 0 otherwise."""
    j = (t + 1).bit_length() - 1
    return 1 if j % 2 == 0 else 0
