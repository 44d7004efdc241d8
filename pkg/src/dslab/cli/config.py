"""Scenario configuration read from a sectioned INI file.

Example::

    [grid]
    nx = 64
    ny = 64
    lx = 8pi
    ly = 8pi

    [initial]
    kind = wave
    c = 0.625
    k = 0.375+0.5j

    [flow]
    level = 2
    dt = 1e-3
    steps = 100

    [tolerances]
    willmore_drift = 1e-5

    [output]
    dir = runs/wave
"""

from __future__ import annotations

import configparser
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..grid import GridSpec

DEFAULT_TOLERANCES = {
    "spectral_derivative": 1e-12,
    "spectral_inverse": 1e-12,
    "dirac_plane": 0.0,
    "dirac_wave": 1e-10,
    "conservation_law": 1e-10,
    "closedness": 1e-10,
    "path_independence": 1e-8,
    "conformality": 1e-8,
    "conformal_factor": 1e-8,
    "mean_curvature": 1e-6,
    "operator_identity_n1": 1e-8,
    "operator_identity_n2": 1e-7,
    "operator_identity_n3": 1e-7,
    "reduction_pair": 1e-12,
    "reduced_aux": 1e-10,
    "nv_rhs": 1e-9,
    "gauge_dirac": 1e-10,
    "gauge_forms": 1e-12,
    "gauge_jets": 1e-10,
    "flow_coherence": 1e-6,
    "willmore_drift": 1e-5,
    "j_drift": 1e-6,
    "fixed_point": 1e-12,
    "quadric_identity": 1e-13,
    "projective_round_trip": 1e-12,
    "coordinate_change": 1e-13,
    "gauss_consistency": 1e-8,
    "real_pair": 1e-12,
    "r3_x4_constant": 1e-10,
    "r3_match": 1e-8,
}

# lower bounds: a check passes when value >= bound
DEFAULT_BOUNDS = {
    "identity_refinement": 10.0,
    "drift_reduction": 8.0,
}


def parse_real(text: str) -> float:
    """Float literal, optionally a multiple of pi (``8pi``, ``8*pi``, ``pi``)."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"([-+0-9.eE]*)\*?pi", s)
    try:
        if m:
            coef = m.group(1)
            return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * np.pi
        return float(s)
    except ValueError as exc:
        raise ConfigError(f"not a real number: {text!r}") from exc


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"not a complex number: {text!r}") from exc


def parse_ints(text: str, count: int | None = None, name: str = "value") -> tuple[int, ...]:
    try:
        out = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{name} must be comma-separated integers, got {text!r}") from exc
    if count is not None and len(out) != count:
        raise ConfigError(f"{name} needs {count} integers, got {text!r}")
    return out


@dataclass(frozen=True)
class GridConfig:
    nx: int = 32
    ny: int = 32
    lx: float = 2 * np.pi
    ly: float = 2 * np.pi

    def spec(self) -> GridSpec:
        try:
            return GridSpec(self.nx, self.ny, self.lx, self.ly)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class InitialConfig:
    kind: str = "wave"
    params: dict = field(default_factory=dict)
    angles: str | None = None
    phi: str | None = None
    fields: str | None = None


@dataclass(frozen=True)
class FlowConfig:
    level: int = 2
    dt: float = 1e-3
    steps: int = 100
    snapshot_every: int = 0
    validate: bool = True


@dataclass(frozen=True)
class ScenarioConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    flow: FlowConfig = field(default_factory=FlowConfig)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    out: str = "dslab_out"
    seed: int = 0
    a3_variant: str = "v1"
    projection: tuple[int, int, int] = (1, 2, 3)

    def to_json(self) -> dict:
        out = asdict(self)
        out["initial"]["params"] = {k: _jsonable(v) for k, v in sorted(self.initial.params.items())}
        out["projection"] = list(self.projection)
        # where the files go is not part of what was computed
        del out["out"]
        return out


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, tuple):
        return list(v)
    return v


# keys of [initial] that are parsed as complex, real, or integer tuples
_COMPLEX_KEYS = {"k", "m", "f"}
_REAL_KEYS = {"c", "amplitude", "eta0", "u"}
_INT_KEYS = {"mode"}
_TUPLE_KEYS = {"direction"}
_PATH_KEYS = {"angles", "phi", "fields"}


def _initial(section, base_dir: Path) -> InitialConfig:
    kind = section.get("kind", "wave").strip()
    params, paths = {}, {}
    for key, raw in section.items():
        if key == "kind":
            continue
        if key in _COMPLEX_KEYS:
            params[key] = parse_complex(raw)
        elif key in _REAL_KEYS:
            params[key] = parse_real(raw)
        elif key in _INT_KEYS:
            params[key] = parse_ints(raw, 1, key)[0]
        elif key in _TUPLE_KEYS:
            params[key] = parse_ints(raw, 2, key)
        elif key in _PATH_KEYS:
            path = Path(raw.strip())
            path = path if path.is_absolute() else base_dir / path
            if not path.is_file():
                raise ConfigError(f"[initial] {key} file not found: {path}")
            paths[key] = str(path)
        else:
            raise ConfigError(f"unknown key {key!r} in [initial]")
    return InitialConfig(kind, params, **paths)


def _tolerances(section) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    if section is None:
        return tols
    if "all" in section:
        value = parse_real(section["all"])
        tols = {k: value for k in tols}
    for key, raw in section.items():
        if key == "all":
            continue
        if key not in tols:
            raise ConfigError(f"unknown tolerance {key!r}")
        tols[key] = parse_real(raw)
    if any(v < 0 for v in tols.values()):
        raise ConfigError("tolerances must be non-negative")
    return tols


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Read a scenario file; ``None`` gives the defaults."""
    if path is None:
        return ScenarioConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    known = {"grid", "initial", "flow", "tolerances", "output", "verify"}
    for name in parser.sections():
        if name not in known:
            raise ConfigError(f"unknown section [{name}]")
    try:
        g = parser["grid"] if parser.has_section("grid") else {}
        grid = GridConfig(
            nx=int(g.get("nx", 32)),
            ny=int(g.get("ny", 32)),
            lx=parse_real(g.get("lx", "2pi")),
            ly=parse_real(g.get("ly", "2pi")),
        )
        grid.spec()
        initial = _initial(parser["initial"], path.parent) if parser.has_section("initial") else InitialConfig()
        f = parser["flow"] if parser.has_section("flow") else None
        flow = FlowConfig()
        a3 = "v1"
        if f is not None:
            flow = FlowConfig(
                level=f.getint("level", 2),
                dt=parse_real(f.get("dt", "1e-3")),
                steps=f.getint("steps", 100),
                snapshot_every=f.getint("snapshot_every", 0),
                validate=f.getboolean("validate", True),
            )
            a3 = f.get("a3_variant", "v1").strip()
        o = parser["output"] if parser.has_section("output") else {}
        v = parser["verify"] if parser.has_section("verify") else {}
        cfg = ScenarioConfig(
            grid=grid,
            initial=initial,
            flow=flow,
            tolerances=_tolerances(parser["tolerances"] if parser.has_section("tolerances") else None),
            out=o.get("dir", "dslab_out"),
            seed=int(v.get("seed", 0)),
            a3_variant=a3,
            projection=parse_ints(o.get("projection", "1,2,3"), 3, "projection"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return validate(cfg)


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    if cfg.flow.level not in (1, 2, 3):
        raise ConfigError(f"flow level must be 1, 2 or 3, got {cfg.flow.level}")
    if cfg.flow.dt <= 0 or cfg.flow.steps < 0 or cfg.flow.snapshot_every < 0:
        raise ConfigError("flow needs dt > 0, steps >= 0 and snapshot_every >= 0")
    if cfg.a3_variant not in ("v1", "printed"):
        raise ConfigError(f"a3 variant must be 'v1' or 'printed', got {cfg.a3_variant!r}")
    if len(cfg.projection) != 3 or any(c not in (1, 2, 3, 4) for c in cfg.projection):
        raise ConfigError(f"projection must pick three of 1..4, got {cfg.projection}")
    cfg.grid.spec()
    return cfg


def with_overrides(cfg: ScenarioConfig, **kw) -> ScenarioConfig:
    """Apply command-line overrides (``None`` values are ignored)."""
    kw = {k: v for k, v in kw.items() if v is not None}
    grid = kw.pop("grid", None)
    level = kw.pop("level", None)
    if grid is not None:
        cfg = replace(cfg, grid=replace(cfg.grid, nx=grid[0], ny=grid[1]))
    if level is not None:
        cfg = replace(cfg, flow=replace(cfg.flow, level=level))
    return validate(replace(cfg, **kw))
