"""Number formatting and JSON/schema helpers for reproducible outputs.

Delimited output uses positional decimal notation with nine significant
digits; JSON output rounds every float to nine significant digits before
serialization so that repeated runs diff cleanly.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

SIG_DIGITS = 9


def fmt_sig(x: float) -> str:
    """Positional decimal representation with nine significant digits."""
    return np.format_float_positional(
        float(x), precision=SIG_DIGITS, unique=False, fractional=False, trim="k"
    )


def round_sig(x: float) -> float:
    """Nearest float to the nine-significant-digit decimal of x."""
    return float(f"{float(x):.{SIG_DIGITS}g}")


def jsonable(obj):
    """Recursively copy obj with every float rounded to nine significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {key: jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(item) for item in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj) -> str:
    """Serialize to JSON text with rounded floats and a trailing newline."""
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(path: Path | str, obj) -> Path:
    path = Path(path)
    path.write_text(dump_json(obj), encoding="utf-8")
    return path


def schema(name: str) -> dict:
    """Load one of the JSON schemas shipped with the package."""
    text = resources.files("rumorgame").joinpath(f"schemas/{name}.schema.json").read_text("utf-8")
    return json.loads(text)
