from __future__ import annotations

from typing import Any, Dict, Iterable, List, Sequence


def require_fields(data: Dict[str, Any], fields: Iterable[str]) -> None:
    missing = [f for f in fields if f not in data]
    if missing:
        raise ValueError(f"missing field(s): {', '.join(missing)}")


def require_list(data: Dict[str, Any], field: str, min_len: int = 0) -> List[Any]:
    v = data.get(field)
    if not isinstance(v, list):
        raise ValueError(f"field {field!r} must be a list")
    if len(v) < min_len:
        raise ValueError(f"field {field!r} needs at least {min_len} entries")
    return v


def check_entry(name: str, passed: bool, **witness: Any) -> Dict[str, Any]:
    """One pass/fail line of a report; `witness` names what failed (k, level, margin, ...)."""
    return {"name": name, "passed": bool(passed), "witness": witness}


def all_passed(entries: Sequence[Dict[str, Any]]) -> bool:
    return all(e.get("passed") for e in entries)
