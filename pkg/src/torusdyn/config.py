"""Run configuration: one TOML document (JSON accepted) mapped to RunConfig.

Every run is fully reproducible from its config; the seed defaults to 0
and is always present in the resolved form that reports embed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import ConfigError

_DEFAULTS = {
    "n_range": [2, 3, 4, 5, 6],
    "epsilons": [0.2],
    "quadrature": 64,
    "candidate_grid": 200,
    "field_grid": 32,
    "seed": 0,
    "alpha": 0.5,
    "permutation_tol": 1e-9,
}


@dataclass(frozen=True)
class RunConfig:
    map_descriptor: dict | None
    n_range: tuple[int, ...]
    epsilons: tuple[float, ...]
    quadrature: int
    candidate_grid: int
    field_grid: int
    seed: int
    alpha: float
    permutation_tol: float
    family_path: str | None
    out_dir: str
    build: dict | None

    def resolved_dict(self) -> dict:
        """The fully resolved configuration embedded into every report."""
        return {
            "map": self.map_descriptor,
            "analysis": {
                "n_range": list(self.n_range),
                "epsilons": list(self.epsilons),
                "quadrature": self.quadrature,
                "candidate_grid": self.candidate_grid,
                "field_grid": self.field_grid,
                "seed": self.seed,
                "alpha": self.alpha,
                "permutation_tol": self.permutation_tol,
                "family": self.family_path,
            },
            "output": {"dir": self.out_dir},
            "build": self.build,
        }


def _parse_document(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: JSON parse error: {exc}") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from exc


def _field(section: dict, name: str, kind, where: str):
    value = section.get(name, _DEFAULTS.get(name))
    try:
        if kind is int:
            out = int(value)
            if out < 0:
                raise ValueError("must be nonnegative")
            return out
        if kind is float:
            return float(value)
        if kind == "ints":
            return tuple(int(v) for v in value)
        if kind == "floats":
            return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{name}: bad value {value!r} ({exc})") from exc
    return value


def load_config(path) -> RunConfig:
    """Parse and validate a config file; errors name the offending field."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    doc = _parse_document(p)
    if not isinstance(doc, dict):
        raise ConfigError(f"{p}: top level must be a table/object")

    map_desc = doc.get("map")
    if map_desc is not None and not isinstance(map_desc, dict):
        raise ConfigError("map: must be a table with a 'kind' field")
    analysis = doc.get("analysis", {})
    if not isinstance(analysis, dict):
        raise ConfigError("analysis: must be a table")
    output = doc.get("output", {})
    build = doc.get("build")
    if build is not None and not isinstance(build, dict):
        raise ConfigError("build: must be a table")

    n_range = _field(analysis, "n_range", "ints", "analysis")
    if not n_range or any(n < 1 for n in n_range):
        raise ConfigError(f"analysis.n_range: need positive depths, got {n_range}")
    epsilons = _field(analysis, "epsilons", "floats", "analysis")
    if not epsilons or any(e <= 0 for e in epsilons):
        raise ConfigError(f"analysis.epsilons: need positive scales, got {epsilons}")

    quadrature = _field(analysis, "quadrature", int, "analysis")
    candidate_grid = _field(analysis, "candidate_grid", int, "analysis")
    field_grid = _field(analysis, "field_grid", int, "analysis")
    if quadrature < 1 or candidate_grid < 1 or field_grid < 1:
        raise ConfigError(
            "analysis: quadrature, candidate_grid and field_grid must be >= 1"
        )

    family = analysis.get("family")
    if family is not None:
        family = str(family)
        if not Path(family).is_absolute():
            family = str((p.parent / family).resolve())

    return RunConfig(
        map_descriptor=map_desc,
        n_range=n_range,
        epsilons=epsilons,
        quadrature=quadrature,
        candidate_grid=candidate_grid,
        field_grid=field_grid,
        seed=_field(analysis, "seed", int, "analysis"),
        alpha=_field(analysis, "alpha", float, "analysis"),
        permutation_tol=_field(analysis, "permutation_tol", float, "analysis"),
        family_path=family,
        out_dir=str(output.get("dir", "out")) if isinstance(output, dict) else "out",
        build=build,
    )


def with_overrides(cfg: RunConfig, seed: int | None = None) -> RunConfig:
    """Apply a command-line seed override; the result is what reports embed."""
    from dataclasses import replace

    if seed is None:
        return cfg
    return replace(cfg, seed=int(seed))
