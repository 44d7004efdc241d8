"""Lax triple (L, A_n, B_n) of the Davey-Stewartson hierarchy for n = 1, 2, 3.

``L = [[-p, d], [-dbar, q]]``.  Operator entries act as written, so for
instance ``(q dbar - dbar q)`` maps ``xi -> q dbar(xi) - dbar(q) xi``.
For n = 2 the returned operators carry the factor ``i`` that makes the
reduction ``p = -u, q = conj(u)`` compatible.

Two readings of the printed n = 3 formulas are exposed:

* ``a3_variant``: ``"v1"`` uses ``(3/2) v1 d`` in the top-left entry of A_3
  (the pattern of b11), ``"printed"`` keeps ``(3/2) v2 d``.
* ``q3_form``: ``"dbar"`` puts ``(1/2) dbar v2`` in the q equation,
  ``"printed"`` keeps ``(1/2) d v2``.

Only ``("v1", "dbar")`` annihilates the operator identity; see
:func:`resolve_a3_variant`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import MissingAuxError
from .grid import (
    ComplexField,
    GridSpec,
    apply_d,
    apply_d_n,
    apply_dbar,
    apply_dbar_n,
    invert_d,
    invert_dbar,
    random_smooth,
    same_grid,
)
from .spinor import SpinorField

A3Variant = Literal["v1", "printed"]
Q3Form = Literal["dbar", "printed"]
Branch = Literal["plus", "minus"]

d, db = apply_d, apply_dbar


def d2(f):
    return apply_d_n(f, 2)


def db2(f):
    return apply_dbar_n(f, 2)


def d3(f):
    return apply_d_n(f, 3)


def db3(f):
    return apply_dbar_n(f, 3)


@dataclass(frozen=True)
class AuxFields:
    v1: ComplexField | None = None
    v2: ComplexField | None = None
    w1: ComplexField | None = None
    w2: ComplexField | None = None


@dataclass(frozen=True)
class HierarchyState:
    p: ComplexField
    q: ComplexField
    u: ComplexField | None = None
    branch: Branch | None = None
    aux: AuxFields | None = None

    def __post_init__(self):
        same_grid(self.p, self.q)

    @property
    def spec(self) -> GridSpec:
        return self.p.spec

    @classmethod
    def reduced(cls, u: ComplexField, branch: Branch = "plus") -> "HierarchyState":
        """``plus``: p = -u, q = conj(u).  ``minus``: p = -conj(u), q = u."""
        if branch == "plus":
            return cls(-u, u.conj(), u, branch)
        if branch == "minus":
            return cls(-u.conj(), u, u, branch)
        raise ValueError(f"unknown branch {branch!r}")

    def with_aux(self, n: int) -> "HierarchyState":
        return replace(self, aux=solve_aux(self, n))


@dataclass(frozen=True)
class FlowLevel:
    n: int
    branch: Branch = "plus"
    reduced: bool = False

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"hierarchy level must be 1, 2 or 3, got {self.n}")


def _level(level) -> int:
    return level.n if isinstance(level, FlowLevel) else int(level)


def solve_aux(state: HierarchyState, n: int) -> AuxFields:
    """Zero-mean solutions of the auxiliary constraints.

    dbar v1 = -2 d(pq),  d v2 = -2 dbar(pq)                (n >= 2)
    dbar w1 = d(p dq),    d w2 = dbar(q dbar p)             (n = 3)
    """
    n = _level(n)
    if n < 2:
        return AuxFields()
    p, q = state.p, state.q
    pq = p * q
    v1 = invert_dbar(-2 * d(pq))
    v2 = invert_d(-2 * db(pq))
    if n < 3:
        return AuxFields(v1, v2)
    w1 = invert_dbar(d(p * d(q)))
    w2 = invert_d(db(q * db(p)))
    return AuxFields(v1, v2, w1, w2)


def aux_residuals(state: HierarchyState, aux: AuxFields) -> dict[str, float]:
    p, q = state.p, state.q
    out = {}
    if aux.v1 is not None:
        out["v1"] = (db(aux.v1) + 2 * d(p * q)).max_abs()
        out["v2"] = (d(aux.v2) + 2 * db(p * q)).max_abs()
    if aux.w1 is not None:
        out["w1"] = (db(aux.w1) - d(p * d(q))).max_abs()
        out["w2"] = (d(aux.w2) - db(q * db(p))).max_abs()
    return out


def _need(aux: AuxFields | None, n: int) -> AuxFields:
    if aux is None or aux.v1 is None or (n == 3 and aux.w1 is None):
        raise MissingAuxError(f"level {n} operators need auxiliary fields; call solve_aux first")
    return aux


def apply_L(state: HierarchyState, psi: SpinorField) -> SpinorField:
    a, b = psi
    return SpinorField(d(b) - state.p * a, -db(a) + state.q * b)


def apply_A(level, state: HierarchyState, aux: AuxFields | None, psi: SpinorField, a3_variant: A3Variant = "v1") -> SpinorField:
    n = _level(level)
    p, q = state.p, state.q
    a, b = psi
    if n == 1:
        return SpinorField(d(a) + q * b, p * a + db(b))
    aux = _need(aux, n)
    v1, v2 = aux.v1, aux.v2
    if n == 2:
        top = -d2(a) - v1 * a + q * db(b) - db(q) * b
        bottom = -p * d(a) + d(p) * a + db2(b) + v2 * b
        return SpinorField(1j * top, 1j * bottom)
    w1, w2 = aux.w1, aux.w2
    lead = v1 if a3_variant == "v1" else v2
    top = (
        d3(a) + 1.5 * lead * d(a) - 3 * w1 * a
        + q * db2(b) - db(q) * db(b) + db2(q) * b + 1.5 * v2 * q * b
    )
    bottom = (
        p * d2(a) - d(p) * d(a) + d2(p) * a + 1.5 * v1 * p * a
        + db3(b) + 1.5 * v2 * db(b) - 3 * w2 * b
    )
    return SpinorField(top, bottom)


def apply_B(level, state: HierarchyState, aux: AuxFields | None, psi: SpinorField) -> SpinorField:
    n = _level(level)
    p, q = state.p, state.q
    s = p + q
    a, b = psi
    if n == 1:
        return SpinorField(db(a) - d(a) - s * b, -s * a + d(b) - db(b))
    aux = _need(aux, n)
    v1, v2 = aux.v1, aux.v2
    if n == 2:
        lap = lambda f: d2(f) + db2(f)  # noqa: E731
        top = lap(a) + (v1 + v2) * a - s * db(b) + db(q) * b - 2 * db(p) * b
        bottom = s * d(a) - d(p) * a + 2 * d(q) * a - lap(b) - (v1 + v2) * b
        return SpinorField(1j * top, 1j * bottom)
    w1, w2 = aux.w1, aux.w2

    def b11(f):
        return db3(f) - d3(f) - 1.5 * (v1 * d(f) - v2 * db(f)) + 3 * (w1 - w2) * f

    b12 = -s * db2(b) - 1.5 * s * v2 * b - (3 * db(p) - db(q)) * db(b) - (3 * db2(p) + db2(q)) * b
    b21 = -s * d2(a) - 1.5 * s * v1 * a - (3 * d(q) - d(p)) * d(a) - (3 * d2(q) + d2(p)) * a
    return SpinorField(b11(a) + b12, b21 - b11(b))


def rhs_pq(n, state: HierarchyState, aux: AuxFields | None = None, q3_form: Q3Form = "dbar") -> tuple[ComplexField, ComplexField]:
    """Time derivatives (p_t, q_t) generated at level n."""
    n = _level(n)
    p, q = state.p, state.q
    if n == 1:
        return d(p) + db(p), d(q) + db(q)
    aux = aux if aux is not None else solve_aux(state, n)
    v1, v2 = aux.v1, aux.v2
    if n == 2:
        pt = 1j * (d2(p) + db2(p) + (v1 + v2) * p)
        qt = -1j * (d2(q) + db2(q) + (v1 + v2) * q)
        return pt, qt
    w1, w2 = aux.w1, aux.w2
    pt = d3(p) + db3(p) + 1.5 * (v1 * d(p) + v2 * db(p)) + 3 * (w1 - w2 + 0.5 * d(v1)) * p
    v2_term = db(v2) if q3_form == "dbar" else d(v2)
    qt = d3(q) + db3(q) + 1.5 * (v1 * d(q) + v2 * db(q)) - 3 * (w1 - w2 - 0.5 * v2_term) * q
    return pt, qt


def rhs_pq3_nonlocal(state: HierarchyState) -> tuple[ComplexField, ComplexField]:
    """Level-3 right sides written with explicit inverse derivatives.

    Cross-check only; uses v/2 in place of v and reads the printed
    ``dbar p^3`` as ``dbar^3 p``.
    """
    p, q = state.p, state.q
    aux = solve_aux(state, 2)
    h1, h2 = 0.5 * aux.v1, 0.5 * aux.v2
    pt = d3(p) + db3(p) + 3 * (h1 * d(p) + h2 * db(p)) - 3 * (invert_d(db(q * db(p))) + invert_dbar(d(q * d(p)))) * p
    qt = d3(q) + db3(q) + 3 * (h1 * d(q) + h2 * db(q)) - 3 * (invert_d(db(p * db(q))) + invert_dbar(d(p * d(q)))) * q
    return pt, qt


# --- reduced equations --------------------------------------------------------

def reduced_aux(u: ComplexField) -> dict[str, ComplexField]:
    """v, w, w' of the reduced equations.

    dbar v = d|u|^2,  dbar w = d(conj(u) du),  d w' = dbar(conj(u) dbar u).
    """
    ub = u.conj()
    return {
        "v": invert_dbar(d(u * ub)),
        "w": invert_dbar(d(ub * d(u))),
        "w_prime": invert_d(db(ub * db(u))),
    }


def rhs_u(n, u: ComplexField) -> ComplexField:
    """Right side of the single-field equation obtained with p = -u, q = conj(u).

    The level-2 equation carries ``2 (v + conj v)``: with dbar v = d|u|^2 this
    is the ``v1 + v2`` of the two-field system.
    """
    n = _level(n)
    if n == 1:
        return d(u) + db(u)
    aux = reduced_aux(u)
    v = aux["v"]
    if n == 2:
        return 1j * (d2(u) + db2(u) + 2 * (v + v.conj()) * u)
    return d3(u) + db3(u) + 3 * (v * d(u) + v.conj() * db(u)) + 3 * (aux["w"] + aux["w_prime"]) * u


def nv_rhs(u: ComplexField) -> ComplexField:
    """Modified Novikov-Veselov right side for real u.

    u_t = d^3 u + dbar^3 u + 3 (v du + vb dbar u) + (3/2)(d v + dbar vb) u,
    with dbar v = d(u^2) and d vb = dbar(u^2).
    """
    u2 = u * u
    v = invert_dbar(d(u2))
    vb = invert_d(db(u2))
    return d3(u) + db3(u) + 3 * (v * d(u) + vb * db(u)) + 1.5 * (d(v) + db(vb)) * u


def reduction_compatibility(n: int, u: ComplexField) -> dict[str, float]:
    """Check that (p_t, q_t) under p = -u, q = conj(u) is a consistent pair."""
    state = HierarchyState.reduced(u, "plus")
    pt, qt = rhs_pq(n, state)
    ut = rhs_u(n, u)
    return {
        "conjugate_pair": (qt - (-pt).conj()).max_abs(),
        "matches_rhs_u": (ut + pt).max_abs(),
    }


# --- operator identity ------------------------------------------------------

def operator_identity_residual(
    n,
    state: HierarchyState,
    psi: SpinorField,
    a3_variant: A3Variant = "v1",
    q3_form: Q3Form = "dbar",
    aux: AuxFields | None = None,
) -> SpinorField:
    """[L, d_t - A_n] Psi + B_n L Psi with d_t L = diag(-p_t, q_t)."""
    n = _level(n)
    aux = aux if aux is not None else solve_aux(state, n)
    pt, qt = rhs_pq(n, state, aux, q3_form)

    def A(x):
        return apply_A(n, state, aux, x, a3_variant)

    Lpsi = apply_L(state, psi)
    LA = apply_L(state, A(psi))
    AL = A(Lpsi)
    BL = apply_B(n, state, aux, Lpsi)
    a, b = psi
    return SpinorField(pt * a - LA.c1 + AL.c1 + BL.c1, -qt * b - LA.c2 + AL.c2 + BL.c2)


def random_state(spec: GridSpec, seed: int = 0, width: float = 1.5, amplitude: float = 0.5):
    """Seeded smooth random (p, q, Psi); the same seed gives the same functions on every grid."""
    seeds = np.random.SeedSequence(seed).generate_state(4)
    p, q, a, b = (random_smooth(spec, int(s), width) for s in seeds)
    return HierarchyState(amplitude * p, amplitude * q), SpinorField(a, b)


def resolve_a3_variant(spec: GridSpec | None = None, seed: int = 0, tol: float = 1e-7) -> dict:
    """Evaluate the level-3 identity for both A_3 readings on seeded random data."""
    spec = spec or GridSpec(32, 32)
    state, psi = random_state(spec, seed)
    aux = solve_aux(state, 3)
    residuals = {
        v: operator_identity_residual(3, state, psi, v, aux=aux).max_abs() for v in ("printed", "v1")
    }
    passing = [v for v, r in residuals.items() if r < tol]
    return {
        "residuals": residuals,
        "passing": passing,
        "resolved": passing[0] if len(passing) == 1 else None,
        "q3_form": "dbar",
        "printed_q3_residual": operator_identity_residual(3, state, psi, "v1", "printed", aux).max_abs(),
    }
