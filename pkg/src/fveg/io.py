"""Field output: CSV with cell centres, and legacy ASCII structured-points VTK."""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, UsageError
from .grid import CellField, build_grid

FORMATS = ("csv", "vtk")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _provenance_lines(provenance: Optional[str]) -> list[str]:
    if not provenance:
        return []
    return [f"# {line}" for line in provenance.splitlines()]


def write_field(
    field: CellField,
    path,
    format: str = "csv",
    names: Optional[Sequence[str]] = None,
    provenance: Optional[str] = None,
) -> Path:
    """Write ``field`` to ``path``; ``provenance`` text is embedded as comments (or the VTK title)."""
    path = Path(path)
    names = list(names) if names is not None else [f"comp{k}" for k in range(field.ncomp)]
    if len(names) != field.ncomp:
        raise UsageError(f"{len(names)} names for {field.ncomp} components")
    if format == "csv":
        text = _csv_text(field, names, provenance)
    elif format in ("vtk", "vtk-structured"):
        text = _vtk_text(field, names, provenance)
    else:
        raise UsageError(f"unknown output format {format!r}; expected one of {FORMATS}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:  # OSError propagates for unwritable paths
        fh.write(text)
    return path


def _csv_text(field, names, provenance):
    X, Y = field.grid.cell_centers()
    cols = [X.ravel(), Y.ravel()] + [field.data[k].ravel() for k in range(field.ncomp)]
    lines = _provenance_lines(provenance)
    g = field.grid
    lines.append(f"# grid nx={g.nx} ny={g.ny} domain={_fmt(g.x0)},{_fmt(g.x1)},{_fmt(g.y0)},{_fmt(g.y1)}")
    lines.append(",".join(["x", "y"] + names))
    rows = np.column_stack(cols)
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _vtk_text(field, names, provenance):
    g = field.grid
    title = " ".join((provenance or "fveg field").split())[:255]
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {g.nx} {g.ny} 1",
        f"ORIGIN {_fmt(g.x0 + 0.5 * g.h)} {_fmt(g.y0 + 0.5 * g.h)} 0",
        f"SPACING {_fmt(g.h)} {_fmt(g.h)} 1",
        f"POINT_DATA {g.ncells}",
    ]
    for k, name in enumerate(names):
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(_fmt(v) for v in field.data[k].ravel())
    return "\n".join(lines) + "\n"


def read_field(path) -> tuple[CellField, list[str]]:
    """Read a CSV written by :func:`write_field`; returns the field and the component names."""
    path = Path(path)
    grid_line, header, body = None, None, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# grid "):
                    grid_line = line
                continue
            if header is None:
                header = line.split(",")
            else:
                body.append([float(v) for v in line.split(",")])
    if grid_line is None or header is None or header[:2] != ["x", "y"]:
        raise InputError(f"{path} is not a field CSV written by this package")
    parts = dict(tok.split("=", 1) for tok in grid_line[len("# grid "):].split())
    nx, ny = int(parts["nx"]), int(parts["ny"])
    grid = build_grid(nx, ny, tuple(float(v) for v in parts["domain"].split(",")))
    arr = np.array(body, dtype=float)
    if arr.shape != (nx * ny, len(header)):
        raise InputError(f"{path}: expected {nx * ny} rows of {len(header)} values")
    data = arr[:, 2:].T.reshape(len(header) - 2, ny, nx)
    return CellField(grid, data), header[2:]
