"""Parameter-grid evaluation of the full pipeline and figure presets.

Each grid point runs steady state -> linearization -> stability -> Lyapunov
-> logarithmic negativity.  Points are independent; a bounded process pool
may evaluate them concurrently, and records are always returned in grid
order so serial and parallel runs produce identical output files.  Unstable
or non-converged points keep their flags and carry empty entanglement
fields; they are never dropped.

Figure presets encode the published operating points: stability maps over
(eta, alpha_in) and (kappa, alpha_in); entanglement versus synthetic phase,
driving strength, cavity decay, Duffing amplitude and thermal occupancy; and
the nondegenerate-resonator variant.  Axis bounds that the captions do not
pin down are chosen to cover the reported features and are documented in the
README.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DivergenceError, TrimodeError
from .model import PARAM_FIELDS, MeanFields, SystemParams, steady_state
from .dynamics import (
    LinearModel,
    StabilityReport,
    assess_stability,
    linear_model,
)
from .gaussian import (
    Bipartition,
    CovarianceMatrix,
    log_negativity,
    reduce_bipartite,
    solve_lyapunov,
    symplectic_eigenvalues,
)

__all__ = [
    "SweepAxis",
    "SweepSpec",
    "SweepRecord",
    "PointResult",
    "evaluate_point",
    "run_sweep",
    "figure_preset",
    "emit_results",
    "PRESET_NAMES",
    "CSV_COLUMNS",
]

# "nth" fans out to both resonators; every other axis must name a parameter
_AXIS_ALIASES = {"nth": ("nth1", "nth2")}

CSV_COLUMNS = (
    "grid_i", "grid_j", "value_i", "value_j",
    "converged", "stable", "max_real_part",
    "E_N_cav_m1", "E_N_cav_m2", "E_N_m1_m2",
    "residual",
)


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: either a linear/log range or an explicit list."""

    name: str
    minimum: float = 0.0
    maximum: float = 0.0
    count: int = 0
    scale: str = "linear"
    values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.name not in PARAM_FIELDS and self.name not in _AXIS_ALIASES:
            raise ValueError(f"axis name {self.name!r} is not a system parameter")
        if self.values is not None:
            if len(self.values) < 2:
                raise ValueError("axis needs at least 2 values")
            return
        if self.scale not in ("linear", "log"):
            raise ValueError(f"axis scale must be linear or log, got {self.scale!r}")
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if not self.minimum < self.maximum:
            raise ValueError("axis requires minimum < maximum")
        if self.scale == "log" and self.minimum <= 0.0:
            raise ValueError("log axis requires a positive minimum")

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.scale == "log":
            return np.geomspace(self.minimum, self.maximum, self.count)
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axes: tuple[SweepAxis, ...]
    bipartitions: tuple[Bipartition, ...] = ()
    stability_margin: float = 0.0

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep takes 1 or 2 axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("axes must sweep distinct parameters")
        if self.stability_margin < 0.0:
            raise ValueError("stability margin must be nonnegative")


@dataclass(frozen=True)
class SweepRecord:
    """Outcome of one grid point; entanglement fields stay None unless the
    point converged and is strictly stable past the margin."""

    grid_i: int
    grid_j: int
    value_i: float
    value_j: float | None
    converged: bool
    stable: bool
    max_real_part: float | None
    en: dict[str, float | None]
    residual: float | None
    lyapunov_residual: float | None = None
    min_symplectic: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class PointResult:
    """Full single-point pipeline output (richer than a SweepRecord)."""

    params: SystemParams
    means: MeanFields
    model: LinearModel
    stability: StabilityReport
    covariance: CovarianceMatrix | None
    en: dict[str, float | None]
    min_symplectic: float | None


def _apply_axis(params: SystemParams, name: str, value: float) -> SystemParams:
    if name in _AXIS_ALIASES:
        return params.replace(**{f: float(value) for f in _AXIS_ALIASES[name]})
    return params.replace(**{name: float(value)})


def evaluate_point(
    params: SystemParams,
    pairs: tuple[Bipartition, ...],
    margin: float = 0.0,
) -> PointResult:
    """Run the whole pipeline at a single parameter point.

    Entanglement is evaluated only when the drift matrix is stable past the
    margin; otherwise the covariance and E_N fields stay None.
    """
    means = steady_state(params)
    model = linear_model(params, means)
    report = assess_stability(model.m_drift, margin)
    en: dict[str, float | None] = {p.value: None for p in pairs}
    cov = None
    min_nu = None
    if report.stable and pairs:
        cov = solve_lyapunov(model.m_drift, model.d_noise)
        min_nu = float(symplectic_eigenvalues(cov)[0])
        for pair in pairs:
            en[pair.value] = log_negativity(reduce_bipartite(cov, pair))
    return PointResult(
        params=params,
        means=means,
        model=model,
        stability=report,
        covariance=cov,
        en=en,
        min_symplectic=min_nu,
    )


def _point_task(task) -> SweepRecord:
    (i, j, vi, vj, base_dict, axis_names, pair_tokens, margin) = task
    params = SystemParams.from_dict(base_dict)
    params = _apply_axis(params, axis_names[0], vi)
    if vj is not None:
        params = _apply_axis(params, axis_names[1], vj)
    pairs = tuple(Bipartition.from_token(t) for t in pair_tokens)
    en: dict[str, float | None] = {t: None for t in pair_tokens}
    try:
        point = evaluate_point(params, pairs, margin)
    except (ConvergenceError, DivergenceError) as exc:
        last = getattr(exc, "last_residual", float("nan"))
        return SweepRecord(
            grid_i=i, grid_j=j, value_i=vi, value_j=vj,
            converged=False, stable=False, max_real_part=None,
            en=en, residual=None if math.isnan(last) else float(last),
            error=f"{type(exc).__name__}: {exc}",
        )
    except TrimodeError as exc:
        return SweepRecord(
            grid_i=i, grid_j=j, value_i=vi, value_j=vj,
            converged=True, stable=False, max_real_part=None,
            en=en, residual=None, error=f"{type(exc).__name__}: {exc}",
        )
    return SweepRecord(
        grid_i=i, grid_j=j, value_i=vi, value_j=vj,
        converged=True,
        stable=point.stability.stable,
        max_real_part=point.stability.max_real_part,
        en=point.en,
        residual=point.means.residual,
        lyapunov_residual=(point.covariance.residual if point.covariance else None),
        min_symplectic=point.min_symplectic,
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRecord]:
    """Evaluate every grid point, in grid order.

    ``workers > 1`` fans points out to a process pool; the record list is
    identical to a serial run because results are collected by grid index.
    Per-point failures are recorded on the point, never raised.
    """
    grids = [ax.grid() for ax in spec.axes]
    axis_names = tuple(ax.name for ax in spec.axes)
    pair_tokens = tuple(p.value for p in spec.bipartitions)
    base_dict = spec.base.to_dict()

    tasks = []
    if len(grids) == 1:
        for i, vi in enumerate(grids[0]):
            tasks.append((i, 0, float(vi), None, base_dict, axis_names,
                          pair_tokens, spec.stability_margin))
    else:
        for i, vi in enumerate(grids[0]):
            for j, vj in enumerate(grids[1]):
                tasks.append((i, j, float(vi), float(vj), base_dict, axis_names,
                              pair_tokens, spec.stability_margin))

    if workers <= 1:
        return [_point_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (8 * workers))
        return list(pool.map(_point_task, tasks, chunksize=chunk))


def _baseline(**overrides) -> SystemParams:
    return SystemParams(
        omega1=1.0, omega2=1.0, gamma1=1e-5, gamma2=1e-5,
        kappa=0.2, delta=-1.0, g=5e-4, jm=1e-2,
        theta=math.pi / 2, eta=0.0, alpha_in=0.0, nth1=0.0, nth2=0.0,
    ).replace(**overrides)


_ETA_SET = (0.0, 5e-6, 5e-5)
_BOTH_CAVITY_PAIRS = (Bipartition.CAVITY_MECH1, Bipartition.CAVITY_MECH2)
_SWEEP_MARGIN = 1e-8

PRESET_NAMES = (
    "fig2a", "fig2b", "fig3", "fig4ab", "fig4cd", "fig5ab", "fig5cd", "fig6",
)
_PRESET_ALIASES = {"fig4": "fig4ab", "fig5": "fig5ab"}


def figure_preset(name: str, points_1d: int = 201, points_2d: int = 101) -> SweepSpec:
    """Grid specification reproducing one of the published panels.

    ``fig4``/``fig5`` alias the (a, b) panels; the (c, d) panels are
    ``fig4cd``/``fig5cd``.  ``points_1d``/``points_2d`` set the dense-axis
    resolution of curve sweeps and stability maps respectively.
    """
    key = _PRESET_ALIASES.get(name, name)
    two_pi = 2.0 * math.pi
    if key == "fig2a":
        return SweepSpec(
            base=_baseline(kappa=0.2, jm=1e-2),
            axes=(
                SweepAxis("eta", 1e-7, 1e-4, points_2d, "log"),
                SweepAxis("alpha_in", 0.0, 2000.0, points_2d, "linear"),
            ),
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig2b":
        return SweepSpec(
            base=_baseline(jm=1e-2, eta=1e-5),
            axes=(
                SweepAxis("kappa", 1e-2, 1.0, points_2d, "log"),
                SweepAxis("alpha_in", 0.0, 2000.0, points_2d, "linear"),
            ),
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig3":
        return SweepSpec(
            base=_baseline(jm=0.2, alpha_in=1000.0, nth1=100.0, nth2=100.0),
            axes=(
                SweepAxis("theta", 0.0, two_pi, points_1d, "linear"),
                SweepAxis("eta", values=_ETA_SET),
            ),
            bipartitions=_BOTH_CAVITY_PAIRS,
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig4ab":
        return SweepSpec(
            base=_baseline(jm=0.2, nth1=100.0, nth2=100.0),
            axes=(
                SweepAxis("alpha_in", 0.0, 1500.0, points_1d, "linear"),
                SweepAxis("eta", values=_ETA_SET),
            ),
            bipartitions=_BOTH_CAVITY_PAIRS,
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig4cd":
        return SweepSpec(
            base=_baseline(jm=0.2, alpha_in=1000.0, nth1=100.0, nth2=100.0),
            axes=(
                SweepAxis("kappa", 2e-2, 1.0, points_1d, "log"),
                SweepAxis("eta", values=_ETA_SET),
            ),
            bipartitions=_BOTH_CAVITY_PAIRS,
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig5ab":
        return SweepSpec(
            base=_baseline(jm=0.2, alpha_in=1500.0),
            axes=(
                SweepAxis("eta", 0.0, 1e-4, points_1d, "linear"),
                SweepAxis("nth", values=(0.0, 100.0)),
            ),
            bipartitions=_BOTH_CAVITY_PAIRS,
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig5cd":
        return SweepSpec(
            base=_baseline(jm=0.2, alpha_in=1000.0),
            axes=(
                SweepAxis("nth", 1.0, 1e5, points_1d, "log"),
                SweepAxis("eta", values=_ETA_SET),
            ),
            bipartitions=_BOTH_CAVITY_PAIRS,
            stability_margin=_SWEEP_MARGIN,
        )
    if key == "fig6":
        return SweepSpec(
            base=_baseline(jm=0.2, alpha_in=1000.0, nth1=100.0, nth2=100.0,
                           omega2=4.0 / 3.0, gamma2=4e-5 / 3.0),
            axes=(
                SweepAxis("theta", 0.0, two_pi, points_1d, "linear"),
                SweepAxis("eta", values=(0.0, 5e-6, 5e-4)),
            ),
            bipartitions=_BOTH_CAVITY_PAIRS,
            stability_margin=_SWEEP_MARGIN,
        )
    raise ValueError(
        f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}"
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17e}"


def record_row(record: SweepRecord) -> dict:
    """Record as a flat mapping following the CSV column schema."""
    return {
        "grid_i": record.grid_i,
        "grid_j": record.grid_j,
        "value_i": record.value_i,
        "value_j": record.value_j,
        "converged": record.converged,
        "stable": record.stable,
        "max_real_part": record.max_real_part,
        "E_N_cav_m1": record.en.get(Bipartition.CAVITY_MECH1.value),
        "E_N_cav_m2": record.en.get(Bipartition.CAVITY_MECH2.value),
        "E_N_m1_m2": record.en.get(Bipartition.MECH1_MECH2.value),
        "residual": record.residual,
    }


def emit_results(records: list[SweepRecord], fmt: str, path: str) -> None:
    """Write records to ``path`` as CSV (fixed column schema, full-precision
    scientific notation, grid order) or JSON (same fields plus diagnostics)."""
    if not records:
        raise ValueError("no records to emit")
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for rec in records:
            row = record_row(rec)
            lines.append(",".join(_fmt(row[col]) for col in CSV_COLUMNS))
        text = "\n".join(lines) + "\n"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif fmt == "json":
        payload = []
        for rec in records:
            row = record_row(rec)
            row["lyapunov_residual"] = rec.lyapunov_residual
            row["min_symplectic"] = rec.min_symplectic
            row["error"] = rec.error
            payload.append(row)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"columns": list(CSV_COLUMNS), "records": payload}, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")
