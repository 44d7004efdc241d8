"""Coupled deformation of (u, psi, phi) and its conserved functionals.

The potential u evolves by the reduced level-n equation while the spinors
follow ``psi_t = A_n^+ psi`` and ``phi_t = A_n^- phi`` (with the factors
``i`` and ``-i`` at n = 2).  ``A^+`` is built from ``p = -u, q = conj(u)``,
``A^-`` from ``p = -conj(u), q = u``.  Time stepping is classical RK4 with
the auxiliary fields re-solved at every stage.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DivergenceError, InvalidParameterError
from .grid import ComplexField, integrate_area, same_grid
from .hierarchy import A3Variant, HierarchyState, apply_A, rhs_u, solve_aux
from .spinor import SpinorField, dirac_residual
from .weierstrass import max_closedness, one_form_coefficients

log = logging.getLogger(__name__)

H_KINDS = ("psi1bar_phi1bar", "psi1bar_phi2", "psi2_phi1bar", "psi2_phi2")
BLOWUP = 1e8


@dataclass(frozen=True)
class DeformationState:
    t: float
    u: ComplexField
    psi: SpinorField
    phi: SpinorField

    def __post_init__(self):
        same_grid(self.u, self.psi.c1, self.phi.c1)

    def fields(self) -> tuple[ComplexField, ...]:
        return (self.u, self.psi.c1, self.psi.c2, self.phi.c1, self.phi.c2)

    @classmethod
    def from_fields(cls, t: float, fields) -> "DeformationState":
        u, a, b, c, d = fields
        return cls(t, u, SpinorField(a, b), SpinorField(c, d))


@dataclass
class DiagnosticsRecord:
    t: float
    W: float
    J: dict[str, complex]
    dirac_residual_max: float
    closedness_max: float
    step: int = 0

    def to_json(self) -> dict:
        out = asdict(self)
        out["J"] = {k: [v.real, v.imag] for k, v in self.J.items()}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DiagnosticsRecord":
        data = dict(data)
        data["J"] = {k: complex(*v) for k, v in data["J"].items()}
        return cls(**data)


@dataclass
class RunResult:
    records: list[DiagnosticsRecord]
    final: DeformationState
    snapshots: list[DeformationState] = field(default_factory=list)


# --- functionals --------------------------------------------------------------

def _h(kind: str, psi: SpinorField, phi: SpinorField) -> ComplexField:
    if kind == "psi1bar_phi1bar":
        return psi.c1.conj() * phi.c1.conj()
    if kind == "psi1bar_phi2":
        return psi.c1.conj() * phi.c2
    if kind == "psi2_phi1bar":
        return psi.c2 * phi.c1.conj()
    if kind == "psi2_phi2":
        return psi.c2 * phi.c2
    raise InvalidParameterError(f"unknown h kind {kind!r}; choose from {H_KINDS}")


def functional_J(h_kind: str, psi: SpinorField, phi: SpinorField) -> complex:
    """Integral of h dz ^ dzbar (= -2i dx dy)."""
    same_grid(psi.c1, phi.c1)
    return integrate_area(_h(h_kind, psi, phi), "dz_wedge_dzbar")


def willmore(u: ComplexField) -> float:
    """Integral of |u|^2, reported with the dx dy measure."""
    return float(integrate_area(u.abs2(), "dxdy").real)


def diagnostics(state: DeformationState, step: int = 0) -> DiagnosticsRecord:
    dirac = max(
        dirac_residual(state.u, state.psi, "D").max_abs(),
        dirac_residual(state.u, state.phi, "Dtilde").max_abs(),
    )
    return DiagnosticsRecord(
        t=float(state.t),
        W=willmore(state.u),
        J={k: functional_J(k, state.psi, state.phi) for k in H_KINDS},
        dirac_residual_max=float(dirac),
        closedness_max=float(max_closedness(one_form_coefficients(state.psi, state.phi))),
        step=step,
    )


# --- time stepping ------------------------------------------------------------

def spinor_rhs(n: int, u: ComplexField, psi: SpinorField, phi: SpinorField, a3_variant: A3Variant = "v1"):
    plus = HierarchyState.reduced(u, "plus")
    minus = HierarchyState.reduced(u, "minus")
    aux_p = solve_aux(plus, n)
    aux_m = solve_aux(minus, n)
    psi_t = apply_A(n, plus, aux_p, psi, a3_variant)
    phi_t = apply_A(n, minus, aux_m, phi, a3_variant)
    if n == 2:
        # apply_A already carries +i; the phi row of the pair uses -i A_2^-
        phi_t = phi_t * -1
    return psi_t, phi_t


def _rhs(n: int, fields, a3_variant: A3Variant):
    u, a, b, c, d = fields
    ut = rhs_u(n, u)
    psi_t, phi_t = spinor_rhs(n, u, SpinorField(a, b), SpinorField(c, d), a3_variant)
    return (ut, psi_t.c1, psi_t.c2, phi_t.c1, phi_t.c2)


def _axpy(x, k, h):
    return tuple(xi + h * ki for xi, ki in zip(x, k))


def step(state: DeformationState, dt: float, n: int = 2, a3_variant: A3Variant = "v1") -> DeformationState:
    """One classical RK4 step of the coupled system."""
    if dt < 0:
        raise InvalidParameterError("dt must be non-negative")
    if n not in (1, 2, 3):
        raise InvalidParameterError(f"level must be 1, 2 or 3, got {n}")
    if dt == 0:
        return state
    y = state.fields()
    k1 = _rhs(n, y, a3_variant)
    k2 = _rhs(n, _axpy(y, k1, dt / 2), a3_variant)
    k3 = _rhs(n, _axpy(y, k2, dt / 2), a3_variant)
    k4 = _rhs(n, _axpy(y, k3, dt), a3_variant)
    out = tuple(
        yi + (dt / 6) * (a + 2 * b + 2 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )
    peak = max(f.max_abs() for f in out)
    if not np.isfinite(peak) or peak > BLOWUP:
        raise DivergenceError(f"field magnitude {peak:.3e} exceeds {BLOWUP:.0e}")
    return DeformationState.from_fields(state.t + dt, out)


def run(
    initial: DeformationState,
    dt: float,
    steps: int,
    n: int = 2,
    a3_variant: A3Variant = "v1",
    snapshot_every: int | None = None,
    validate_tol: float | None = 1e-8,
) -> RunResult:
    """Integrate ``steps`` RK4 steps, recording diagnostics after each one."""
    first = diagnostics(initial, 0)
    if validate_tol is not None and first.dirac_residual_max > validate_tol * max(1.0, initial.u.max_abs()):
        raise InvalidParameterError(
            f"initial spinors do not solve the Dirac pair (residual {first.dirac_residual_max:.3e})"
        )
    records = [first]
    snapshots = [initial] if snapshot_every else []
    state = initial
    for i in range(1, steps + 1):
        try:
            state = step(state, dt, n, a3_variant)
        except (DivergenceError, ValueError) as exc:
            raise DivergenceError(f"step {i}: {exc}", step=i) from exc
        records.append(diagnostics(state, i))
        if snapshot_every and i % snapshot_every == 0:
            snapshots.append(state)
    log.debug("run finished: n=%d steps=%d t=%.4g", n, steps, state.t)
    return RunResult(records, state, snapshots)


def _drifts(records: list[DiagnosticsRecord]) -> dict[str, float]:
    r0 = records[0]
    wscale = abs(r0.W) if r0.W != 0 else 1.0
    out = {"W": max(abs(r.W - r0.W) for r in records) / wscale}
    for k in r0.J:
        out[f"J_{k}"] = max(abs(r.J[k] - r0.J[k]) for r in records) / (1 + abs(r0.J[k]))
    out["dirac_residual_max"] = max(r.dirac_residual_max for r in records)
    out["closedness_max"] = max(r.closedness_max for r in records)
    return out


def conservation_report(records: list[DiagnosticsRecord], records_half: list[DiagnosticsRecord] | None = None) -> dict:
    """Max relative drift of W and of each J; with a dt/2 run, the drift reduction factors.

    W drift is relative to |W(0)|; J drift is |J(t) - J(0)| / (1 + |J(0)|).
    """
    if not records:
        raise InvalidParameterError("conservation report needs at least one record")
    report = {"drift": _drifts(records)}
    if records_half is not None:
        half = _drifts(records_half)
        report["drift_half"] = half
        report["reduction"] = {
            k: (report["drift"][k] / half[k] if half[k] > 0 else float("inf"))
            for k in half
            if k == "W" or k.startswith("J_")
        }
    return report
