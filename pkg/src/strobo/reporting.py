"""Study drivers behind the command line, and deterministic CSV/JSON writers.

Floats are written with 17 significant digits and no timestamps appear in
data files, so identical configurations give byte-identical output.
"""

from __future__ import annotations

import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import su2
from .clock import ClockDistribution
from .evolution import Propagator, StateVector, discrete_step
from .lattice import (AngularGrid, build_case_a, build_case_b, case_a_eigenvalues, case_b_eigenvalues,
                      free_particle_spectrum, onshell_lattice, onshell_select, spin_labels)
from .spectral import convergence_study, eig

SCHEMA_VERSION = 1


# -- serialization -------------------------------------------------------------

def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + i for i in items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with fixed 17-digit float formatting."""
    return _encode(obj, indent, 0) + "\n"


def json_document(command: str, config: dict, result: dict) -> str:
    return dumps({"schema_version": SCHEMA_VERSION, "command": command, "config": config, "result": result})


def csv_document(config: dict, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with a ``#``-prefixed reproducibility header carrying the config."""
    out = io.StringIO()
    out.write(f"# schema_version: {SCHEMA_VERSION}\n")
    out.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(fmt_float(v))
            else:
                cells.append(str(v))
        out.write(",".join(cells) + "\n")
    return out.getvalue()


# -- studies ---------------------------------------------------------------------

def oscillator_builder(model: str, omega: float, delta: float):
    build = {"osc-a": build_case_a, "osc-b": build_case_b}[model]
    return lambda N: build(AngularGrid(N, omega, delta))


def labelled_spectrum(model: str, grid: AngularGrid, solver: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Numerical eigenvalues aligned with ``m = 1..N`` and the closed-form values."""
    op = (build_case_a if model == "osc-a" else build_case_b)(grid)
    formula = (case_a_eigenvalues if model == "osc-a" else case_b_eigenvalues)(grid).astype(complex)
    report = eig(op, method=solver)
    if report.labels is not None:
        numeric = np.array([report.by_label(m) for m in grid.modes])
    else:
        cost = np.abs(report.eigenvalues[:, None] - formula[None, :])
        rows, cols = linear_sum_assignment(cost)
        numeric = np.empty(grid.N, dtype=complex)
        numeric[cols] = report.eigenvalues[rows]
    return numeric, formula


def spectrum_table(model: str, N: int, omega: float, delta: float, solver: str = "auto"):
    grid = AngularGrid(N, omega, delta)
    numeric, formula = labelled_spectrum(model, grid, solver)
    columns = ["m", "E_numeric_re", "E_numeric_im", "E_formula_re", "E_formula_im", "abs_error"]
    rows = [
        (int(m), e.real, e.imag, f.real, f.imag, abs(e - f))
        for m, e, f in zip(grid.modes, numeric, formula)
    ]
    return columns, rows


def convergence_result(model: str, mode: int, omega: float, delta: float, Ns: Sequence[int]) -> dict:
    rep = convergence_study(
        oscillator_builder(model, omega, delta),
        lambda N: [omega * (m + delta) for m in (mode,)],
        Ns,
        modes=(mode,),
    )
    return rep.as_dict()


def su2_result(two_s: int, omega: float) -> dict:
    rep = su2.spin_matrices(two_s)
    coeffs = su2.OscCoefficients.canonical(two_s, omega)
    res = su2.verify_identities(rep, coeffs)
    levels = np.sort(np.linalg.eigvalsh(su2.oscillator_energy(rep, coeffs).toarray()))
    level_err = float(np.abs(levels - np.sort(su2.oscillator_levels(two_s, omega))).max())
    out = res.as_dict()
    out["oscillator_levels"] = level_err
    out["max_residual"] = max(res.worst, level_err)
    return out


def particle_table(two_s: int, L: float, mass: float):
    lat = onshell_lattice(two_s, L, mass)
    entries = onshell_select(lat, free_particle_spectrum(lat))
    labels = spin_labels(entries, two_s)
    rep = su2.spin_matrices(two_s)
    diag = su2.emergent_hamiltonian(rep, lat.prefactor).entries.diagonal().real
    idx = su2.emergent_index(rep, labels[:, 0], labels[:, 1], labels[:, 2])
    columns = ["k0", "k1", "kbar0", "kbar1", "sbar_z", "sz0", "sz1", "reduced_energy",
               "continuum_energy", "emergent_energy", "lattice_re", "lattice_im"]
    rows = [
        (int(k[0]), int(k[1]), int(kb[0]), int(kb[1]), float(lb[0]), float(lb[1]), float(lb[2]),
         float(r), float(c), float(diag[i]), e.real, e.imag)
        for k, kb, lb, r, c, i, e in zip(entries.k, entries.kbar, labels, entries.reduced,
                                         entries.continuum, idx, entries.energy)
    ]
    return columns, rows


def evolution_table(model: str, N: int, omega: float, delta: float, two_s: int, clock: ClockDistribution,
                    T: float, steps: int, nodes: int):
    """Discrete-step trajectory compared with the deterministic ``exp(-i n T H)`` solution."""
    if model == "su2":
        H = su2.emergent_hamiltonian(su2.spin_matrices(two_s), omega)
    else:
        H = oscillator_builder(model, omega, delta)(N)
    # deterministic pseudo-random initial state, fixed seed for reproducibility
    rng = np.random.default_rng(0)
    psi0 = StateVector.of(rng.normal(size=H.dim) + 1j * rng.normal(size=H.dim), H)
    prop = Propagator(H)
    columns = ["step", "t", "norm", "energy_re", "energy_im", "residual_vs_exact"]
    rows = []
    psi = psi0
    for n in range(steps + 1):
        if n:
            psi = discrete_step(psi, H, clock, T, nodes, prop)
        v = psi.amplitudes
        energy = complex(np.vdot(v, H.apply(v)) / np.vdot(v, v))
        exact = prop.apply(n * T, psi0.amplitudes)
        rows.append((n, n * T, psi.norm, energy.real, energy.imag, float(np.linalg.norm(v - exact))))
    return columns, rows
