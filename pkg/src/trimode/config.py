"""Plain-text configuration dialect for parameters and sweep definitions.

Base parameters are ``key = value`` lines (one per line, keys exactly the
:class:`~trimode.model.SystemParams` field names).  A sweep file adds one or
two ``[axis]`` sections and an optional ``[sweep]`` section::

    kappa = 0.2
    alpha_in = 1000       # inline comments allowed

    [axis]
    name = theta
    min = 0
    max = 6.283185307179586
    count = 201
    scale = linear        # or log

    [axis]
    name = eta
    values = 0, 5e-6, 5e-5

    [sweep]
    pairs = cav-m1, cav-m2
    margin = 1e-8

Unknown keys are a hard error everywhere.  The axis name ``nth`` fans out to
both thermal occupancies.
"""

from __future__ import annotations

from .errors import ConfigError
from .gaussian import Bipartition
from .model import PARAM_FIELDS, SystemParams
from .sweep import SweepAxis, SweepSpec

__all__ = [
    "load_params",
    "load_sweep_spec",
    "parse_overrides",
]

_AXIS_KEYS = {"name", "min", "max", "count", "scale", "values"}
_SWEEP_KEYS = {"pairs", "margin"}


def _parse_sections(path: str) -> tuple[dict, list[dict], dict]:
    """Split a config file into (base, axis sections, sweep section)."""
    base: dict[str, str] = {}
    axes: list[dict[str, str]] = []
    sweep: dict[str, str] = {}
    current = base
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            section = line.strip("[]").strip().lower()
            if section == "axis":
                axes.append({})
                current = axes[-1]
            elif section == "sweep":
                current = sweep
            else:
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in current:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        current[key] = value
    return base, axes, sweep


def _float(value: str, context: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{context}: not a number: {value!r}") from exc


def _base_params(base: dict[str, str], path: str) -> SystemParams:
    unknown = set(base) - set(PARAM_FIELDS)
    if unknown:
        raise ConfigError(f"{path}: unknown parameter(s): {', '.join(sorted(unknown))}")
    return SystemParams(**{k: _float(v, f"{path}: {k}") for k, v in base.items()})


def load_params(path: str) -> SystemParams:
    """Load base parameters; sweep sections, if present, are ignored here."""
    base, _axes, _sweep = _parse_sections(path)
    return _base_params(base, path)


def _build_axis(section: dict[str, str], path: str) -> SweepAxis:
    unknown = set(section) - _AXIS_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown axis key(s): {', '.join(sorted(unknown))}")
    if "name" not in section:
        raise ConfigError(f"{path}: axis section needs a name")
    name = section["name"]
    try:
        if "values" in section:
            values = tuple(
                _float(tok.strip(), f"{path}: axis {name}")
                for tok in section["values"].split(",") if tok.strip()
            )
            return SweepAxis(name, values=values)
        return SweepAxis(
            name,
            minimum=_float(section.get("min", ""), f"{path}: axis {name} min"),
            maximum=_float(section.get("max", ""), f"{path}: axis {name} max"),
            count=int(_float(section.get("count", ""), f"{path}: axis {name} count")),
            scale=section.get("scale", "linear"),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: axis {name}: {exc}") from exc


def load_sweep_spec(
    path: str,
    overrides: dict[str, float] | None = None,
    pairs: tuple[Bipartition, ...] | None = None,
    margin: float | None = None,
) -> SweepSpec:
    """Load a sweep definition; ``overrides``/``pairs``/``margin`` given by
    the caller (e.g. CLI flags) take precedence over file contents."""
    base, axis_sections, sweep_section = _parse_sections(path)
    if not axis_sections:
        raise ConfigError(f"{path}: a sweep config needs at least one [axis] section")
    params = _base_params(base, path)
    if overrides:
        params = params.replace(**overrides)
    axes = tuple(_build_axis(sec, path) for sec in axis_sections)

    unknown = set(sweep_section) - _SWEEP_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown sweep key(s): {', '.join(sorted(unknown))}")
    if pairs is None:
        tokens = [t.strip() for t in sweep_section.get("pairs", "").split(",") if t.strip()]
        try:
            pairs = tuple(Bipartition.from_token(t) for t in tokens)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if margin is None:
        margin = _float(sweep_section.get("margin", "0"), f"{path}: margin")
    try:
        return SweepSpec(base=params, axes=axes, bipartitions=pairs,
                         stability_margin=margin)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_overrides(pairs: list[str]) -> dict[str, float]:
    """Parse repeatable ``--set key=value`` flags."""
    out: dict[str, float] = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in PARAM_FIELDS:
            raise ConfigError(f"unknown parameter {key!r} in --set")
        out[key] = _float(value, f"--set {key}")
    return out
