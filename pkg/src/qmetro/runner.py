"""Run a scenario end to end and write its artifacts."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .channel import InputFamily, PovmFamily, amplitude_damping, unitary_with_noise
from .design import (
    WORST,
    DesignDistribution,
    ExperimentCounts,
    average_case,
    evaluate_curve,
    round_counts,
    worst_case,
)
from .fisher import FisherTable, build_table, f_max_curve, qfi_grid
from .scenario import Scenario

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("theta", "f_ac", "f_wc", "f_max", "f_qfi_best_beta")
SWEEP_COLUMNS = ("beta", "f_qfi", "grid_point")
COUNT_COLUMNS = ("index", "phi", "beta", "lambda_ac", "count_ac", "lambda_wc", "count_wc")


@dataclass
class CellResult:
    """Results for one (gamma, mode) combination."""

    gamma: float
    mode: str
    table: FisherTable
    ac: DesignDistribution
    wc: DesignDistribution
    f_ac: np.ndarray
    f_wc: np.ndarray
    f_max: np.ndarray
    qfi: np.ndarray  # (n_beta_available, n_theta)
    f_qfi_best: np.ndarray
    counts_ac: ExperimentCounts
    counts_wc: ExperimentCounts
    warnings: list[str] = field(default_factory=list)


@dataclass
class QfiSweep:
    gamma: float
    betas: np.ndarray
    values: np.ndarray
    grid_point: np.ndarray


@dataclass
class RunReport:
    scenario: Scenario
    cells: list[CellResult]
    sweeps: list[QfiSweep]

    @property
    def provenance(self) -> dict:
        return {"scenario_sha256": self.scenario.digest(), "tool": "qmetro", "version": __version__}

    def cell(self, gamma: float, mode: str) -> CellResult:
        for c in self.cells:
            if c.gamma == gamma and c.mode == mode:
                return c
        raise KeyError((gamma, mode))


def cell_families(scenario: Scenario, mode: str) -> tuple[InputFamily, PovmFamily]:
    betas = scenario.betas() if mode in ("input-only", "both") else np.array([scenario.fixed_beta])
    phis = scenario.phis() if mode in ("povm-only", "both") else np.array([scenario.fixed_phi])
    return InputFamily.qubit(betas), PovmFamily.qubit(phis)


def run_cell(scenario: Scenario, gamma: float, mode: str, workers: int = 1) -> CellResult:
    ch = unitary_with_noise(scenario.hamiltonian_matrix(), amplitude_damping(gamma))
    inputs, povms = cell_families(scenario, mode)
    table = build_table(ch, inputs, povms, scenario.thetas(), scenario.prior_weights(), workers=workers)
    warnings = []
    n_sing = int(table.singular.sum())
    if n_sing:
        warnings.append(f"{n_sing} singular Fisher entries; affected configurations excluded from designs")

    ac = average_case(table)
    wc = worst_case(table)
    qfi = qfi_grid(ch, inputs.states, table.thetas)
    return CellResult(
        gamma=gamma,
        mode=mode,
        table=table,
        ac=ac,
        wc=wc,
        f_ac=evaluate_curve(table, ac.weights),
        f_wc=evaluate_curve(table, wc.weights),
        f_max=f_max_curve(table),
        qfi=qfi,
        f_qfi_best=qfi.max(axis=0),
        counts_ac=round_counts(ac.weights, scenario.l_expt, table),
        counts_wc=round_counts(wc.weights, scenario.l_expt, table, kind=WORST),
        warnings=warnings,
    )


def qfi_sweep(scenario: Scenario, gamma: float) -> QfiSweep:
    """QFI against input angle on a dense grid merged with the available grid points.

    Evaluated at the first theta sample; the sweep does not depend on theta
    for unitary-then-damping channels of this form.
    """
    ch = unitary_with_noise(scenario.hamiltonian_matrix(), amplitude_damping(gamma))
    dense = np.linspace(*scenario.beta_range, scenario.qfi_sweep_points)
    grid = scenario.betas()
    betas = np.array(sorted(set(dense.tolist()) | set(grid.tolist())))
    on_grid = np.array([bool(np.any(np.abs(grid - b) <= 1e-12)) for b in betas])
    inputs = InputFamily.qubit(betas)
    values = qfi_grid(ch, inputs.states, [scenario.thetas()[0]])[:, 0]
    return QfiSweep(gamma, betas, values, on_grid)


def run(scenario: Scenario, workers: int = 1) -> RunReport:
    cells = [run_cell(scenario, g, m, workers) for g in scenario.gammas for m in scenario.modes]
    for c in cells:
        for w in c.warnings:
            logger.warning("gamma=%g %s: %s", c.gamma, c.mode, w)
    sweeps = [qfi_sweep(scenario, g) for g in scenario.gammas]
    return RunReport(scenario, cells, sweeps)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def gamma_tag(gamma: float) -> str:
    return format(gamma, "g")


def design_json(d: DesignDistribution, counts: ExperimentCounts) -> dict:
    return {
        "kind": d.kind,
        "objective": d.objective,
        "lambda": d.weights.tolist(),
        "support": [
            {"index": s.index, "phi": s.phi, "beta": s.beta, "phi_over_pi": s.phi / np.pi,
             "beta_over_pi": s.beta / np.pi, "weight": s.weight}
            for s in d.support
        ],
        "certificate": d.certificate.tolist(),
        "counts": counts.counts.tolist(),
        "l_expt": counts.total,
        "bounds": {"lower": counts.lower_bound, "upper": counts.upper_bound},
    }


def curves_csv(c: CellResult) -> str:
    rows = zip(c.table.thetas, c.f_ac, c.f_wc, c.f_max, c.f_qfi_best)
    return _csv(CURVE_COLUMNS, [[_fmt(v) for v in r] for r in rows])


def counts_csv(c: CellResult) -> str:
    rows = []
    for k in range(c.table.n_config):
        phi, beta = c.table.grid.labels(k)
        rows.append([k, _fmt(phi), _fmt(beta), _fmt(c.ac.weights[k]), int(c.counts_ac.counts[k]),
                     _fmt(c.wc.weights[k]), int(c.counts_wc.counts[k])])
    return _csv(COUNT_COLUMNS, rows)


def sweep_csv(s: QfiSweep) -> str:
    return _csv(SWEEP_COLUMNS, [[_fmt(b), _fmt(v), int(g)] for b, v, g in zip(s.betas, s.values, s.grid_point)])


def summary(report: RunReport) -> dict:
    cells = []
    for c in report.cells:
        cells.append({
            "gamma": c.gamma,
            "mode": c.mode,
            "average_case": {"objective": c.ac.objective,
                             "support": [[s.phi / np.pi, s.beta / np.pi, s.weight] for s in c.ac.support]},
            "worst_case": {"objective": c.wc.objective,
                           "support": [[s.phi / np.pi, s.beta / np.pi, s.weight] for s in c.wc.support]},
            "singular_entries": int(c.table.singular.sum()),
            "warnings": c.warnings,
        })
    return {"provenance": report.provenance, "cells": cells}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(report: RunReport, out_dir) -> list[Path]:
    """Write every artifact of ``report`` into ``out_dir``; return the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    for c in report.cells:
        tag = f"{gamma_tag(c.gamma)}_{c.mode}"
        files[f"curves_{tag}.csv"] = curves_csv(c)
        files[f"counts_{tag}.csv"] = counts_csv(c)
        files[f"design_{tag}.json"] = _dump({
            "provenance": report.provenance,
            "gamma": c.gamma,
            "mode": c.mode,
            "average_case": design_json(c.ac, c.counts_ac),
            "worst_case": design_json(c.wc, c.counts_wc),
        })
    for s in report.sweeps:
        files[f"qfi_sweep_{gamma_tag(s.gamma)}.csv"] = sweep_csv(s)
    files["report.json"] = _dump(summary(report))

    written = []
    for name in sorted(files):
        path = out / name
        path.write_text(files[name], encoding="utf-8")
        written.append(path)
    return written
