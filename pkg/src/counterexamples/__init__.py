from __future__ import annotations

from typing import Optional

from src.counterexamples.ce1 import gen_ce1
from src.counterexamples.ce2 import gen_ce2
from src.counterexamples.ce3 import gen_ce3
from src.counterexamples.ce4 import OPEN_KINDS, gen_ce4
from src.counterexamples.demos import gen_mis_demos
from src.counterexamples.instance import (
    CLOSED_LOOP_C,
    DISPLACEMENT_THRESHOLD,
    CertificateTemplate,
    Ce3Strips,
    ConstructionError,
    Instance,
    StripLevel,
    pick_direction,
    reference_trajectory,
)

NAMES = ("1", "2", "3", "4", "misA", "misB")

# empty tuple: any step rule
ALLOWED_STRATEGIES = {
    "1": ("linesearch",),
    "2": ("linesearch",),
    "3": ("closed",),
    "4": OPEN_KINDS,
    "misA": (),
    "misB": (),
}


def canonical_name(name: str) -> str:
    key = name[2:] if name.lower().startswith("ce") else name
    if key not in NAMES:
        raise ConstructionError(f"unknown instance {name!r}; expected one of {', '.join(NAMES)}")
    return key


def strategy_allowed(name: str, kind: str) -> bool:
    allowed = ALLOWED_STRATEGIES[canonical_name(name)]
    return not allowed or kind in allowed


def generate(name: str, depth: int = 40, K: int = 2, strategy: Optional[str] = None) -> Instance:
    """Instance by CLI name; `strategy` only selects CE4's open-loop rule."""
    key = canonical_name(name)
    if key == "1":
        return gen_ce1(depth)
    if key == "2":
        return gen_ce2(depth)
    if key == "3":
        return gen_ce3(K, depth)
    if key == "4":
        return gen_ce4(strategy if strategy in OPEN_KINDS else "open2", depth)
    return next(inst for inst in gen_mis_demos() if inst.name == key)


__all__ = [
    "ALLOWED_STRATEGIES",
    "CLOSED_LOOP_C",
    "DISPLACEMENT_THRESHOLD",
    "NAMES",
    "CertificateTemplate",
    "Ce3Strips",
    "ConstructionError",
    "Instance",
    "StripLevel",
    "canonical_name",
    "gen_ce1",
    "gen_ce2",
    "gen_ce3",
    "gen_ce4",
    "gen_mis_demos",
    "generate",
    "pick_direction",
    "reference_trajectory",
    "strategy_allowed",
]
