"""Initial data named by a scenario configuration."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DSLabError
from ..flow import DeformationState
from ..grid import ComplexField, GridSpec, fields_from_csv, same_grid
from ..spinor import (
    CATALOG_KINDS,
    LiftAngles,
    SpinorField,
    catalog_solution,
    lift_from_angles,
)

INITIAL_KINDS = CATALOG_KINDS + ("constant", "lift", "fields")


@dataclass(frozen=True)
class InitialData:
    u: ComplexField
    psi: SpinorField
    phi: SpinorField
    description: str

    def state(self) -> DeformationState:
        return DeformationState(0.0, self.u, self.psi, self.phi)


def lattice_wave_vector(spec: GridSpec) -> complex:
    """Smallest diagonal wave vector compatible with the torus."""
    return complex(np.pi / spec.lx, np.pi / spec.ly)


def _read_fields(path: str, blocks: int, spec: GridSpec) -> list[ComplexField]:
    try:
        fields = fields_from_csv(Path(path).read_text(encoding="utf-8"))
    except (OSError, DSLabError) as exc:
        raise ConfigError(f"cannot read fields from {path}: {exc}") from exc
    if len(fields) != blocks:
        raise ConfigError(f"{path} holds {len(fields)} fields, expected {blocks}")
    if fields[0].spec != spec:
        raise ConfigError(f"{path} is sampled on {fields[0].spec}, the scenario grid is {spec}")
    return fields


def build_initial(initial, spec: GridSpec) -> InitialData:
    kind = initial.kind
    params = dict(initial.params)
    try:
        if kind in CATALOG_KINDS:
            if kind in ("wave", "gauged_wave") and "k" not in params and "c" not in params:
                k = lattice_wave_vector(spec)
                params.update(k=k, c=abs(k))
            sol = catalog_solution(kind, spec, **params)
            return InitialData(sol.p.p, sol.psi, sol.phi, f"catalog {kind}")
        if kind == "constant":
            # u = c with constant spinors; a fixed point of the level-2 flow
            c = float(params.get("u", 1.0))
            one, zero = spec.field(np.ones(spec.shape)), spec.zeros()
            return InitialData(c * one, SpinorField(one, zero), SpinorField(one, zero), "constant potential")
        if kind == "lift":
            if initial.angles is None:
                raise ConfigError("kind = lift needs an angles file (theta and eta blocks)")
            theta, eta = _read_fields(initial.angles, 2, spec)
            _, p, psi = lift_from_angles(LiftAngles(theta, eta))
            if initial.phi is not None:
                (a, b) = _read_fields(initial.phi, 2, spec)
                phi = SpinorField(a, b)
            elif np.abs(p.p.imag).max() <= 1e-10 * max(1.0, p.p.max_abs()):
                phi = psi
            else:
                raise ConfigError("the lift potential is complex; supply a phi file")
            return InitialData(p.p, psi, phi, "lift from angles")
        if kind == "fields":
            if initial.fields is None:
                raise ConfigError("kind = fields needs a fields file (u, psi1, psi2, phi1, phi2)")
            u, a, b, c, d = _read_fields(initial.fields, 5, spec)
            same_grid(u, a, b, c, d)
            return InitialData(u, SpinorField(a, b), SpinorField(c, d), "fields from file")
    except ConfigError:
        raise
    except DSLabError as exc:
        raise ConfigError(f"invalid initial data: {exc}") from exc
    raise ConfigError(f"unknown initial kind {kind!r}; choose from {INITIAL_KINDS}")
