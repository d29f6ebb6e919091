"""Text serialization for lattice fields.

Layout::

    dressage-field v1 <D> <N_0> ... <N_{D-1}> <components>
    <components values for site 0>
    <components values for site 1>
    ...

Sites are listed in row-major order; values are written with 17 significant
digits so a write/read cycle is lossless.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FieldFormatError
from .lattice import Lattice, ScalarField, VectorField, new_lattice

MAGIC = "dressage-field"
VERSION = "v1"


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps_field(field: ScalarField | VectorField) -> str:
    lat = field.lattice
    if isinstance(field, VectorField):
        rows = field.values.reshape(lat.ndim, -1).T
    else:
        rows = field.values.reshape(-1, 1)
    header = " ".join([MAGIC, VERSION, str(lat.ndim), *map(str, lat.dims), str(rows.shape[1])])
    lines = [header]
    lines.extend(" ".join(format_float(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def loads_field(text: str, vector: bool | None = None) -> ScalarField | VectorField:
    """Parse a field; ``vector`` forces the field type (needed for D=1)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FieldFormatError("empty field file")
    head = lines[0].split()
    if len(head) < 4 or head[0] != MAGIC or head[1] != VERSION:
        raise FieldFormatError(f"bad header: {lines[0]!r}")
    try:
        ndim = int(head[2])
        dims = [int(n) for n in head[3:3 + ndim]]
        comps = int(head[3 + ndim])
    except (ValueError, IndexError) as exc:
        raise FieldFormatError(f"bad header: {lines[0]!r}") from exc
    if len(head) != 4 + ndim:
        raise FieldFormatError(f"bad header: {lines[0]!r}")
    lat: Lattice = new_lattice(dims)
    try:
        data = np.array([[float(x) for x in ln.split()] for ln in lines[1:]], dtype=float)
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc
    if data.shape != (lat.volume, comps):
        raise FieldFormatError(f"expected {lat.volume} rows of {comps} values, got {data.shape}")
    if vector is None:
        vector = comps == ndim and comps != 1
    if vector:
        if comps != ndim:
            raise FieldFormatError(f"vector field needs {ndim} components, file has {comps}")
        return VectorField(lat, data.T.copy())
    if comps != 1:
        raise FieldFormatError(f"scalar field needs 1 component, file has {comps}")
    return ScalarField(lat, data[:, 0])


def write_field(path, field) -> None:
    Path(path).write_text(dumps_field(field))


def read_field(path, vector: bool | None = None):
    return loads_field(Path(path).read_text(), vector=vector)
