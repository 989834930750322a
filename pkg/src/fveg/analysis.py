"""Error norms, convergence orders and refinement-ladder orchestration."""
from __future__ import annotations

import csv
import io as _io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import FVEGError, UsageError
from .flux import integrate
from .grid import CellField
from .problems import ProblemSpec, exact_solution, make_system


def l1_error(numeric: CellField, reference: CellField) -> np.ndarray:
    """Per-component ``sum_K |K| |U_K - U_K^ref|``."""
    g, r = numeric.grid, reference.grid
    if g != r:
        raise UsageError(f"grid mismatch: {g} vs {r}")
    if numeric.ncomp != reference.ncomp:
        raise UsageError(f"component mismatch: {numeric.ncomp} vs {reference.ncomp}")
    return np.abs(numeric.data - reference.data).sum(axis=(1, 2)) * g.cell_measure


def eoc(e_coarse: float, e_fine: float) -> tuple[float, bool]:
    """``log2(e_coarse / e_fine)`` and a validity flag (false, with NaN, for non-positive errors)."""
    if not (e_coarse > 0 and e_fine > 0):
        return math.nan, False
    return math.log2(e_coarse / e_fine), True


def restrict(field: CellField, nx: int) -> np.ndarray:
    """Average a fine field down to ``nx`` columns by repeated 2x2 averaging."""
    d = field.data
    n = field.grid.nx
    if n % nx or (n // nx) & (n // nx - 1):
        raise UsageError(f"reference grid {n} is not a power-of-two refinement of {nx}")
    while d.shape[2] > nx:
        d = 0.25 * (d[:, 0::2, 0::2] + d[:, 1::2, 0::2] + d[:, 0::2, 1::2] + d[:, 1::2, 1::2])
    return d


@dataclass
class ErrorReport:
    nx: int
    errors: np.ndarray
    eoc: Optional[np.ndarray] = None
    eoc_valid: Optional[np.ndarray] = None
    seconds: float = 0.0
    steps: int = 0
    fallback_edges: int = 0


@dataclass
class ConvergenceTable:
    problem: str
    components: tuple[str, ...]
    rows: list[ErrorReport] = field(default_factory=list)
    provenance: str = ""

    def add(self, nx, errors, seconds=0.0, steps=0, fallback_edges=0):
        rep = ErrorReport(nx, np.asarray(errors, dtype=float), seconds=seconds, steps=steps, fallback_edges=fallback_edges)
        if self.rows:
            pairs = [eoc(a, b) for a, b in zip(self.rows[-1].errors, rep.errors)]
            rep.eoc = np.array([p[0] for p in pairs])
            rep.eoc_valid = np.array([p[1] for p in pairs])
        self.rows.append(rep)
        return rep

    def to_csv(self) -> str:
        """Deterministic CSV (no timings) with provenance comments."""
        buf = _io.StringIO()
        for line in self.provenance.splitlines():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        header = ["nx"]
        for c in self.components:
            header += [f"err_{c}", f"eoc_{c}"]
        w.writerow(header)
        for r in self.rows:
            row = [r.nx]
            for k in range(len(self.components)):
                row.append(f"{r.errors[k]:.17g}")
                row.append("" if r.eoc is None else f"{r.eoc[k]:.17g}")
            w.writerow(row)
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"{'1/h':>6}" + "".join(f" {c:>11} {'EOC':>7}" for c in self.components) + f" {'time[s]':>9}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            s = f"{r.nx:>6}"
            for k in range(len(self.components)):
                e = "" if r.eoc is None else f"{r.eoc[k]:7.4f}"
                s += f" {r.errors[k]:11.3e} {e:>7}"
            lines.append(s + f" {r.seconds:9.2f}")
        return "\n".join(lines)


class LadderAborted(FVEGError):
    """A run of the ladder failed; ``partial`` holds the rows finished before it."""

    def __init__(self, message, partial: ConvergenceTable):
        super().__init__(message)
        self.partial = partial


def run_convergence(
    spec: ProblemSpec,
    ladder: Sequence[int],
    cfl: Optional[float] = None,
    t_final: Optional[float] = None,
    mode: str = "eg-with-fallback",
    supersonic: str = "fallback",
    ref_nx: int = 256,
    csv_path=None,
    provenance: str = "",
    grid_label=None,
) -> ConvergenceTable:
    """Run ``spec`` on every grid of ``ladder`` and tabulate L1 errors and EOCs.

    Errors are measured against the exact solution when one exists at the
    final time, and otherwise against a run on ``ref_nx`` restricted to each
    coarse grid.  ``grid_label`` maps nx to the table's row label (``1/h``).
    """
    cfl = spec.cfl if cfl is None else cfl
    t_final = spec.t_final if t_final is None else t_final
    system = make_system(spec)
    label = grid_label or (lambda nx: nx)
    table = ConvergenceTable(spec.name, system.components, provenance=provenance or f"fveg {__version__}")

    def solve(nx):
        g = spec.grid(nx)
        t0 = time.perf_counter()
        out, st = integrate(system, spec.initial_field(g), t_final, cfl, mode=mode, supersonic=supersonic)
        return out, st, time.perf_counter() - t0

    reference = None
    try:
        if not spec.has_exact(t_final):
            reference, _, _ = solve(ref_nx)
        for nx in ladder:
            out, st, secs = solve(nx)
            if reference is None:
                ref = exact_solution(spec, out.grid, t_final)
            else:
                ref = CellField(out.grid, restrict(reference, nx))
            table.add(label(nx), l1_error(out, ref), secs, st.step_count, st.fallback_edges)
    except FVEGError as exc:
        if csv_path is not None:
            Path(csv_path).write_text(table.to_csv())
        raise LadderAborted(f"convergence ladder aborted: {exc}", table) from exc
    if csv_path is not None:
        Path(csv_path).write_text(table.to_csv())
    return table
