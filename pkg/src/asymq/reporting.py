"""Deterministic JSON emission for reports."""
from __future__ import annotations

import json
import math

import numpy as np

REPORT_FORMAT = "asymq-report/1"


def plain(obj):
    """Convert numpy values to JSON-native ones; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, allow_nan=False)


def load_schema(name: str) -> dict:
    """Return a bundled JSON schema (``"report"`` or ``"state"``)."""
    from importlib.resources import files

    return json.loads(files(__package__).joinpath("schemas", f"{name}.schema.json").read_text())
