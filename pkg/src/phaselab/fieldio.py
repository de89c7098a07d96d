"""Field and grid serialization.

A field is stored as a pair of files sharing one base path: a JSON header
``<base>.json`` (grid metadata, face roles, array layout) and the raw
row-major samples ``<base>.npy``.  Loading restores the field bit-exactly.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .energy import ScalarField
from .grid import grid_from_dict, grid_to_dict, roles_from_dict, roles_to_dict

__all__ = ["save_field", "load_field"]


def save_field(field: ScalarField, base_path: str) -> list[str]:
    """Write ``<base>.json`` + ``<base>.npy``; returns the paths written."""
    header = {
        "format": "phaselab-field-1",
        "grid": grid_to_dict(field.grid),
        "faces": roles_to_dict(field.roles),
        "layout": {"order": "C", "dtype": "float64"},
    }
    json_path = base_path + ".json"
    npy_path = base_path + ".npy"
    os.makedirs(os.path.dirname(os.path.abspath(json_path)), exist_ok=True)
    with open(json_path, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    np.save(npy_path, np.ascontiguousarray(field.values, dtype=np.float64))
    return [json_path, npy_path]


def load_field(base_path: str) -> ScalarField:
    with open(base_path + ".json") as fh:
        header = json.load(fh)
    if header.get("format") != "phaselab-field-1":
        raise ValueError(f"unrecognized field file format in {base_path}.json")
    grid = grid_from_dict(header["grid"])
    roles = roles_from_dict(header["faces"])
    values = np.load(base_path + ".npy")
    return ScalarField(grid, values, roles)
