"""Batch layer: sweep configs, worker-pool execution, CSV and manifest output.

A sweep iterates the cartesian product (model, side, N, g, epsilon) in config
order, computes the charging figures of merit and the collective advantage
for every point, and writes one CSV row per point plus a JSON manifest
capturing the fully resolved configuration.

Reproducibility contract: the pipeline contains no randomized algorithm and
iterates deterministically, so re-running an identical config byte-reproduces
the CSV.  Wall-clock timings are therefore recorded in the manifest, not the
CSV; pass ``record_timing=True`` (CLI ``--timing``) to fill the CSV column at
the cost of byte-reproducibility.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, replace
from multiprocessing import get_context
from pathlib import Path

from . import __version__
from .classical import SingularityError, classical_run
from .metrics import NoEnergyTransferError, charging_metrics
from .models import ModelKind, ModelSpec, NumericsConfig, Side
from .quantum import ConservationError, KrylovConvergenceError, converged_cutoff

__all__ = [
    "ConfigError",
    "SweepConfig",
    "ResultRow",
    "SweepResult",
    "ConvergenceResult",
    "load_sweep_config",
    "convergence_check",
    "run_sweep",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "model", "side", "N", "g_over_omega0", "epsilon", "cutoff",
    "tau_bar", "E_bar_norm", "P_bar_norm", "gamma", "ratio",
    "norm_drift", "energy_drift", "wall_time_s", "status",
)


class ConfigError(ValueError):
    """A sweep configuration failed validation."""


@dataclass(frozen=True)
class SweepConfig:
    """Declarative description of one parameter sweep."""

    kinds: tuple[ModelKind, ...]
    sides: tuple[Side, ...]
    n_values: tuple[int, ...]
    g_values: tuple[float, ...]
    epsilon_values: tuple[float, ...] = (1e-3,)
    omega0: float = 1.0
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    out: str = "sweep.csv"
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self) -> None:
        for name in ("kinds", "sides", "n_values", "g_values", "epsilon_values"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a non-empty list")
        if len(set(self.kinds)) != len(self.kinds) or len(set(self.sides)) != len(self.sides):
            raise ConfigError("kinds and sides must not repeat")
        if any(int(n) != n or n < 1 for n in self.n_values):
            raise ConfigError("n_values must be positive integers")
        if any(g < 0 for g in self.g_values):
            raise ConfigError("g_values must be non-negative")
        if self.omega0 <= 0:
            raise ConfigError("omega0 must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        # Every grid point must make a valid ModelSpec; surface bad epsilon
        # etc. at config time rather than mid-sweep.
        try:
            for kind in self.kinds:
                for side in self.sides:
                    for eps in self.epsilon_values:
                        ModelSpec(kind, side, int(self.n_values[0]),
                                  float(self.g_values[0]), self.omega0, eps,
                                  numerics=self.numerics)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def csv_path(self) -> Path:
        path = Path(self.out)
        if path.suffix != ".csv":
            path = Path(str(path) + ".csv")
        return path

    @property
    def manifest_path(self) -> Path:
        return self.csv_path.with_suffix("").with_suffix(".manifest.json")


def _parse_kind(value: str) -> ModelKind:
    try:
        return ModelKind(value.lower())
    except ValueError:
        raise ConfigError(f"unknown model kind {value!r}") from None


def _parse_side(value: str) -> Side:
    try:
        return Side(value.lower())
    except ValueError:
        raise ConfigError(f"unknown side {value!r}") from None


def load_sweep_config(source) -> SweepConfig:
    """Build a SweepConfig from a JSON file path or an already-parsed dict."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    elif isinstance(source, dict):
        raw = dict(source)
    else:
        raise ConfigError(f"unsupported config source {type(source)!r}")

    known = {"models", "sides", "N", "g", "epsilon", "omega0", "numerics",
             "out", "workers", "timing"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        numerics = NumericsConfig(**raw.get("numerics", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numerics block: {exc}") from exc

    def listed(key, default=None):
        value = raw.get(key, default)
        if value is None:
            raise ConfigError(f"missing required config key {key!r}")
        return value if isinstance(value, (list, tuple)) else [value]

    return SweepConfig(
        kinds=tuple(_parse_kind(k) for k in listed("models")),
        sides=tuple(_parse_side(s) for s in listed("sides")),
        n_values=tuple(int(n) for n in listed("N")),
        g_values=tuple(float(g) for g in listed("g")),
        epsilon_values=tuple(float(e) for e in listed("epsilon", [1e-3])),
        omega0=float(raw.get("omega0", 1.0)),
        numerics=numerics,
        out=str(raw.get("out", "sweep.csv")),
        workers=int(raw.get("workers", 1)),
        record_timing=bool(raw.get("timing", False)),
    )


@dataclass(frozen=True)
class ResultRow:
    """One sweep grid point, mirroring the CSV columns."""

    model: str
    side: str
    n_units: int
    g_over_omega0: float
    epsilon: float
    cutoff: int | None
    tau_bar: float | None
    e_bar_norm: float | None
    p_bar_norm: float | None
    gamma: float | None
    ratio: float | None
    norm_drift: float | None
    energy_drift: float | None
    wall_time_s: float | None
    status: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[ResultRow, ...]
    csv_path: Path
    manifest_path: Path

    @property
    def n_failed(self) -> int:
        return sum(1 for row in self.rows if row.status != "ok")


@dataclass(frozen=True)
class ConvergenceResult:
    """Validated spec plus the audit trail that justified it."""

    spec: ModelSpec
    trail: tuple


def convergence_check(spec: ModelSpec) -> ConvergenceResult:
    """Resolve the cheapest numerical settings meeting the drift invariants.

    Quantum Dicke: photon cutoff doubling until the battery energy is stable.
    Classical: tolerance tightening until the energy drift bound holds.
    Everything else is already exact in its truncation and passes unchanged.
    """
    if spec.side is Side.QUANTUM:
        if spec.kind is ModelKind.DICKE:
            cutoff, trail = converged_cutoff(spec)
            return ConvergenceResult(replace(spec, cutoff=cutoff), trail)
        return ConvergenceResult(spec, ())
    trail = []
    numerics = spec.numerics
    while True:
        candidate = replace(spec, numerics=numerics)
        try:
            run = classical_run(candidate)
            trail.append((numerics.ode_rel_tol, numerics.ode_abs_tol,
                          run.trajectory.diagnostics.energy_drift))
            return ConvergenceResult(candidate, tuple(trail))
        except ConservationError as exc:
            trail.append((numerics.ode_rel_tol, numerics.ode_abs_tol, str(exc)))
            if numerics.ode_rel_tol <= 1e-13:
                raise
            numerics = replace(numerics, ode_rel_tol=numerics.ode_rel_tol / 100.0,
                               ode_abs_tol=numerics.ode_abs_tol / 100.0)


def _job_specs(config: SweepConfig) -> list[ModelSpec]:
    """Row specs in config order, then any missing N=1 baselines."""
    specs: list[ModelSpec] = []
    seen = set()
    for kind in config.kinds:
        for side in config.sides:
            for n in config.n_values:
                for g in config.g_values:
                    for eps in config.epsilon_values:
                        spec = ModelSpec(kind, side, int(n), float(g), config.omega0,
                                         float(eps), numerics=config.numerics)
                        specs.append(spec)
                        seen.add(spec)
    for spec in list(specs):
        baseline = replace(spec, n_units=1)
        if baseline not in seen:
            specs.append(baseline)
            seen.add(baseline)
    return specs


def _compute_job(spec: ModelSpec) -> dict:
    """Charging metrics for one spec; exceptions become row statuses."""
    started = time.perf_counter()
    payload: dict = {"status": "ok", "error": ""}
    try:
        metrics, run = charging_metrics(spec)
        diag = run.trajectory.diagnostics
        payload.update(
            tau_bar=metrics.tau_bar,
            e_bar=metrics.e_bar,
            p_bar=metrics.p_bar,
            cutoff=diag.cutoff,
            norm_drift=diag.norm_drift,
            energy_drift=diag.energy_drift,
        )
    except ConservationError as exc:
        payload["status"] = "invalid"
        payload["error"] = str(exc)
        if exc.diagnostics is not None:
            payload["norm_drift"] = exc.diagnostics.norm_drift
            payload["energy_drift"] = exc.diagnostics.energy_drift
    except (NoEnergyTransferError, SingularityError, KrylovConvergenceError,
            ValueError, RuntimeError) as exc:
        payload["status"] = "error"
        payload["error"] = f"{type(exc).__name__}: {exc}"
    payload["wall_time_s"] = time.perf_counter() - started
    return payload


def _execute_jobs(specs: list[ModelSpec], workers: int) -> dict[ModelSpec, dict]:
    if workers > 1 and len(specs) > 1:
        with get_context("fork").Pool(processes=workers) as pool:
            results = pool.map(_compute_job, specs)
    else:
        results = [_compute_job(spec) for spec in specs]
    return dict(zip(specs, results))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def run_sweep(config: SweepConfig) -> SweepResult:
    """Execute a sweep and persist the CSV plus its manifest sidecar.

    Row order follows the config; N=1 baselines are computed once per
    (model, side, g, epsilon) and shared.  The quantum/classical ratio R is
    filled on quantum rows whose classical twin is part of the same sweep.
    Failed points are recorded per-row, never dropped.
    """
    specs = _job_specs(config)
    jobs = _execute_jobs(specs, config.workers)

    n_rows = (len(config.kinds) * len(config.sides) * len(config.n_values)
              * len(config.g_values) * len(config.epsilon_values))
    row_specs = specs[:n_rows]

    def gamma_for(spec: ModelSpec):
        job = jobs[spec]
        base = jobs[replace(spec, n_units=1)]
        if job["status"] != "ok" or base["status"] != "ok":
            return None
        return job["p_bar"] / (spec.n_units * base["p_bar"])

    rows: list[ResultRow] = []
    for spec in row_specs:
        job = jobs[spec]
        gamma = gamma_for(spec)
        ratio = None
        if spec.side is Side.QUANTUM and Side.CLASSICAL in config.sides and gamma is not None:
            twin_gamma = gamma_for(replace(spec, side=Side.CLASSICAL))
            if twin_gamma is not None:
                ratio = gamma / twin_gamma
        scale = spec.energy_scale
        tau_bar = job.get("tau_bar")
        e_bar = job.get("e_bar")
        p_bar = job.get("p_bar")
        energy_drift = job.get("energy_drift")
        status = job["status"]
        if status == "error" and job["error"]:
            status = f"error: {job['error']}"
        rows.append(ResultRow(
            model=spec.kind.value,
            side=spec.side.value,
            n_units=spec.n_units,
            g_over_omega0=spec.g / spec.omega0,
            epsilon=spec.epsilon,
            cutoff=job.get("cutoff"),
            tau_bar=None if tau_bar is None else tau_bar * spec.omega0,
            e_bar_norm=None if e_bar is None else e_bar / scale,
            p_bar_norm=None if p_bar is None else p_bar / (scale * spec.omega0),
            gamma=gamma,
            ratio=ratio,
            norm_drift=job.get("norm_drift"),
            energy_drift=None if energy_drift is None else energy_drift / scale,
            wall_time_s=job["wall_time_s"] if config.record_timing else None,
            status=status,
        ))

    csv_path = config.csv_path
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with csv_path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([
                row.model, row.side, row.n_units, _fmt(row.g_over_omega0),
                _fmt(row.epsilon), _fmt(row.cutoff), _fmt(row.tau_bar),
                _fmt(row.e_bar_norm), _fmt(row.p_bar_norm), _fmt(row.gamma),
                _fmt(row.ratio), _fmt(row.norm_drift), _fmt(row.energy_drift),
                _fmt(row.wall_time_s), row.status,
            ])

    manifest = {
        "tool": {"name": "chargesim", "version": __version__},
        "csv": csv_path.name,
        "columns": list(CSV_COLUMNS),
        "config": {
            "models": [k.value for k in config.kinds],
            "sides": [s.value for s in config.sides],
            "N": list(config.n_values),
            "g": list(config.g_values),
            "epsilon": list(config.epsilon_values),
            "omega0": config.omega0,
            "numerics": {k: getattr(config.numerics, k)
                         for k in NumericsConfig.__dataclass_fields__},
            "workers": config.workers,
            "timing": config.record_timing,
        },
        "jobs": [
            {
                "model": spec.kind.value,
                "side": spec.side.value,
                "N": spec.n_units,
                "g": spec.g,
                "epsilon": spec.epsilon,
                "status": jobs[spec]["status"],
                "error": jobs[spec]["error"],
                "wall_time_s": round(jobs[spec]["wall_time_s"], 6),
            }
            for spec in specs
        ],
    }
    config.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    return SweepResult(rows=tuple(rows), csv_path=csv_path,
                       manifest_path=config.manifest_path)
