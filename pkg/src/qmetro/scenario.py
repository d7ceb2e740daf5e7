"""Declarative scenario files (JSON) describing a design study."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .matkernel import is_hermitian

MODES = ("povm-only", "input-only", "both")
_UNITS = {"rad": 1.0, "pi": np.pi, "half_pi": np.pi / 2}


@dataclass(frozen=True)
class Scenario:
    """A validated study description.  Angles are stored in radians."""

    hamiltonian: tuple[tuple[complex, ...], ...]
    gammas: tuple[float, ...]
    theta_range: tuple[float, float]
    n_theta: int
    n_beta: int = 10
    n_phi: int = 10
    beta_range: tuple[float, float] = (0.0, np.pi)
    phi_range: tuple[float, float] = (0.0, np.pi)
    prior: tuple[float, ...] | None = None
    l_expt: int = 100
    modes: tuple[str, ...] = MODES
    fixed_beta: float = 0.0
    fixed_phi: float = 0.0
    qfi_sweep_points: int = 201
    name: str = field(default="scenario", compare=False)

    def hamiltonian_matrix(self) -> np.ndarray:
        return np.array(self.hamiltonian, dtype=complex)

    def thetas(self) -> np.ndarray:
        return inclusive_grid(*self.theta_range, self.n_theta)

    def betas(self) -> np.ndarray:
        return inclusive_grid(*self.beta_range, self.n_beta)

    def phis(self) -> np.ndarray:
        return inclusive_grid(*self.phi_range, self.n_phi)

    def prior_weights(self) -> np.ndarray:
        if self.prior is None:
            return np.full(self.n_theta, 1.0 / self.n_theta)
        p = np.array(self.prior, dtype=float)
        return p / p.sum()

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("name")
        d["hamiltonian"] = [[[z.real, z.imag] for z in row] for row in self.hamiltonian]
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def inclusive_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` points ``lo + j (hi - lo)/(n - 1)``, both endpoints included."""
    if n == 1:
        return np.array([float(lo)])
    step = (hi - lo) / (n - 1)
    return lo + step * np.arange(n)


def _require(raw: dict, key: str):
    if key not in raw:
        raise ScenarioError(f"{key} required")
    return raw[key]


def _angle_range(raw, key: str, default=None) -> tuple[float, float]:
    value = raw.get(key, default)
    if value is None:
        raise ScenarioError(f"{key} required")
    unit = "rad"
    if isinstance(value, dict):
        unit = value.get("unit", "rad")
        if unit not in _UNITS:
            raise ScenarioError(f"{key}.unit must be one of {sorted(_UNITS)}")
        try:
            value = (value["min"], value["max"])
        except KeyError as exc:
            raise ScenarioError(f"{key} needs 'min' and 'max'") from exc
    try:
        lo, hi = (float(v) * _UNITS[unit] for v in value)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{key} must be a [min, max] pair") from exc
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise ScenarioError(f"{key} must satisfy min <= max")
    return lo, hi


def _count(raw, key: str, default=None) -> int:
    value = raw.get(key, default)
    if value is None:
        raise ScenarioError(f"{key} required")
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ScenarioError(f"{key} must be an integer >= 1")
    return value


def _entry(z, key: str) -> complex:
    if isinstance(z, (int, float)) and not isinstance(z, bool):
        return complex(z)
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return complex(float(z[0]), float(z[1]))
    raise ScenarioError(f"{key} entries must be numbers or [real, imag] pairs")


def _hamiltonian(raw) -> tuple[tuple[complex, ...], ...]:
    rows = _require(raw, "hamiltonian")
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) or len(r) != len(rows) for r in rows):
        raise ScenarioError("hamiltonian must be a square list of rows")
    h = np.array([[_entry(z, "hamiltonian") for z in row] for row in rows])
    if not is_hermitian(h):
        raise ScenarioError("hamiltonian must be Hermitian")
    if h.shape != (2, 2):
        raise ScenarioError("hamiltonian must be 2x2: inputs, POVMs and damping are qubit families")
    return tuple(tuple(complex(z) for z in row) for row in h)


def scenario_from_dict(raw: dict, name: str = "scenario") -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    h = _hamiltonian(raw)

    gam = raw.get("gamma", 0.0)
    gammas = gam if isinstance(gam, list) else [gam]
    if not gammas:
        raise ScenarioError("gamma must not be empty")
    try:
        gammas = tuple(float(g) for g in gammas)
    except (TypeError, ValueError) as exc:
        raise ScenarioError("gamma must be a number or list of numbers") from exc
    if any(not 0.0 <= g <= 1.0 for g in gammas):
        raise ScenarioError("gamma values must lie in [0, 1]")

    n_theta = _count(raw, "n_theta")
    prior = raw.get("prior", "uniform")
    if prior == "uniform":
        prior = None
    else:
        try:
            prior = tuple(float(p) for p in prior)
        except (TypeError, ValueError) as exc:
            raise ScenarioError("prior must be 'uniform' or a list of weights") from exc
        if len(prior) != n_theta or any(p < 0 or not np.isfinite(p) for p in prior) or sum(prior) <= 0:
            raise ScenarioError("prior must have n_theta nonnegative weights with a positive sum")

    modes = raw.get("modes", raw.get("mode", list(MODES)))
    modes = [modes] if isinstance(modes, str) else list(modes)
    if not modes or any(m not in MODES for m in modes):
        raise ScenarioError(f"modes must be drawn from {MODES}")

    def angle(key):
        v = raw.get(key, 0.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioError(f"{key} must be a number (radians)")
        return float(v)

    return Scenario(
        hamiltonian=h,
        gammas=gammas,
        theta_range=_angle_range(raw, "theta_range"),
        n_theta=n_theta,
        n_beta=_count(raw, "n_beta", 10),
        n_phi=_count(raw, "n_phi", 10),
        beta_range=_angle_range(raw, "beta_range", [0.0, np.pi]),
        phi_range=_angle_range(raw, "phi_range", [0.0, np.pi]),
        prior=prior,
        l_expt=_count(raw, "l_expt", 100),
        modes=tuple(m for m in MODES if m in modes),
        fixed_beta=angle("fixed_beta"),
        fixed_phi=angle("fixed_phi"),
        qfi_sweep_points=_count(raw, "qfi_sweep_points", 201),
        name=str(raw.get("name", name)),
    )


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ScenarioError(f"scenario file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw, name=path.stem)


REFERENCE = {
    "name": "reference",
    "hamiltonian": [[0.7071067811865475, 0.7071067811865475], [0.7071067811865475, -0.7071067811865475]],
    "gamma": [0.0, 0.25],
    "theta_range": {"min": 0.2, "max": 0.8, "unit": "half_pi"},
    "n_theta": 100,
    "n_beta": 10,
    "n_phi": 10,
    "beta_range": {"min": 0, "max": 1, "unit": "pi"},
    "phi_range": {"min": 0, "max": 1, "unit": "pi"},
    "prior": "uniform",
    "l_expt": 100,
    "modes": list(MODES),
    "fixed_beta": 0.0,
    "fixed_phi": 0.0,
}


def reference_scenario() -> Scenario:
    """Hadamard-like generator with amplitude damping, 10x10 configuration grid."""
    return scenario_from_dict(dict(REFERENCE), name="reference")
