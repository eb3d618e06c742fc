from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Union

Scalar = Union[int, float, Fraction]


class FormatError(Exception):
    pass


def render_scalar(s: Scalar) -> Union[str, float, None]:
    """Rationals become "p/q" (or "p"), floats stay floats; NaN and inf become null."""
    if isinstance(s, Fraction):
        return str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}"
    if isinstance(s, bool):
        raise FormatError("booleans are not scalars")
    if isinstance(s, int):
        return str(s)
    f = float(s)
    if math.isnan(f) or math.isinf(f):
        return None
    return f


def parse_scalar(raw: Any) -> Scalar:
    if isinstance(raw, bool):
        raise FormatError(f"not a scalar: {raw!r}")
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(f"invalid rational literal: {raw!r}") from e
    raise FormatError(f"not a scalar: {raw!r}")


def encode_record(obj: Dict[str, Any]) -> str:
    # key order is the caller's; no whitespace so identical runs give identical bytes
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def decode_record(line: str) -> Dict[str, Any]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid json line: {e}") from e
    if not isinstance(obj, dict):
        raise FormatError("record must be a JSON object")
    return obj


def write_jsonl(path: str | Path, records: Iterable[Dict[str, Any]]) -> int:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with p.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(encode_record(rec))
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> Iterator[Dict[str, Any]]:
    p = Path(path)
    if not p.is_file():
        raise FormatError(f"missing file: {p}")
    with p.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield decode_record(line)
            except FormatError as e:
                raise FormatError(f"{p}:{lineno}: {e}") from e


def write_json(path: str | Path, obj: Any) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.is_file():
        raise FormatError(f"missing file: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{p}: invalid json: {e}") from e


def _flatten(value: Any) -> List[Any]:
    if isinstance(value, (list, tuple)):
        return [("" if v is None else v) for v in value]
    return ["" if value is None else value]


def write_csv(path: str | Path, records: Sequence[Dict[str, Any]], columns: Sequence[str]) -> None:
    """Vector-valued columns expand to `<name>_x`, `<name>_y`."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    header: List[str] = []
    widths: Dict[str, int] = {}
    for c in columns:
        sample = next((r[c] for r in records if r.get(c) is not None), None)
        width = len(sample) if isinstance(sample, (list, tuple)) else 1
        widths[c] = width
        header.extend([f"{c}_x", f"{c}_y"] if width == 2 else [c])
    with p.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in records:
            row: List[Any] = []
            for c in columns:
                cells = _flatten(r.get(c))
                if len(cells) < widths[c]:
                    cells = cells + [""] * (widths[c] - len(cells))
                row.extend(cells)
            w.writerow(row)
