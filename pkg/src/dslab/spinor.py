"""Spinor fields, the Dirac operators D and D~, gauges, lifts and the catalog.

Conventions
-----------
``D`` acts on psi with rows ``(p psi1 + d psi2, -dbar psi1 + conj(p) psi2)``.
``Dtilde`` acts on phi with rows ``(conj(p) phi1 + d phi2, -dbar phi1 + p phi2)``.
A gauge ``f`` maps ``psi -> (e^f psi1, e^conj(f) psi2)`` and
``phi -> (e^-f phi1, e^-conj(f) phi2)``; for holomorphic ``f`` the potential
becomes ``p e^(conj(f) - f)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .analytic import Jet
from .errors import (
    GaugeNotHolomorphicError,
    GridMismatchError,
    InvalidParameterError,
)
from .grid import ComplexField, GridSpec, apply_d, apply_dbar, invert_dbar, same_grid


@dataclass(frozen=True)
class SpinorField:
    c1: ComplexField
    c2: ComplexField

    def __post_init__(self):
        if self.c1.spec != self.c2.spec:
            raise GridMismatchError("spinor components live on different grids")

    @property
    def spec(self) -> GridSpec:
        return self.c1.spec

    def __iter__(self):
        yield self.c1
        yield self.c2

    def __add__(self, other: "SpinorField") -> "SpinorField":
        return SpinorField(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        return SpinorField(self.c1 - other.c1, self.c2 - other.c2)

    def __mul__(self, scalar) -> "SpinorField":
        return SpinorField(self.c1 * scalar, self.c2 * scalar)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(self.c1.max_abs(), self.c2.max_abs())

    @classmethod
    def constant(cls, spec: GridSpec, a: complex, b: complex) -> "SpinorField":
        return cls(spec.field(a), spec.field(b))


@dataclass(frozen=True)
class SurfacePotential:
    p: ComplexField


@dataclass(frozen=True)
class GaugeFunction:
    f: ComplexField


@dataclass(frozen=True)
class LiftAngles:
    theta: ComplexField
    eta: ComplexField
    tol: float = 1e-12

    def __post_init__(self):
        same_grid(self.theta, self.eta)
        for name, fld in (("theta", self.theta), ("eta", self.eta)):
            if np.abs(fld.imag).max() > self.tol * max(1.0, fld.max_abs()):
                raise InvalidParameterError(f"lift angle {name} must be real-valued")


# --- Dirac operators --------------------------------------------------------

def _potential(p) -> ComplexField:
    return p.p if isinstance(p, SurfacePotential) else p


def dirac_residual(p, s: SpinorField, which: Literal["D", "Dtilde"] = "D") -> SpinorField:
    """Two-row residual of ``D s = 0`` or ``Dtilde s = 0``."""
    p = _potential(p)
    same_grid(p, s.c1)
    a, b = s
    if which == "D":
        top, bottom = p, p.conj()
    elif which == "Dtilde":
        top, bottom = p.conj(), p
    else:
        raise ValueError(f"unknown Dirac operator {which!r}")
    return SpinorField(top * a + apply_d(b), -apply_dbar(a) + bottom * b)


def dirac_residual_jets(p: Jet, s1: Jet, s2: Jet, which: str = "D") -> tuple[np.ndarray, np.ndarray]:
    """Pointwise Dirac residual from closed-form jets."""
    top, bottom = (p.value, p.value.conj()) if which == "D" else (p.value.conj(), p.value)
    return top * s1.value + s2.dz, -s1.dzb + bottom * s2.value


def conservation_residual(psi: SpinorField, phi: SpinorField) -> tuple[ComplexField, ComplexField]:
    """Residuals of the two divergence laws satisfied by Dirac pairs."""
    same_grid(psi.c1, phi.c1)
    r1 = apply_d(phi.c2 * psi.c2) + apply_dbar(phi.c1 * psi.c1)
    r2 = apply_dbar(psi.c1 * phi.c2.conj()) - apply_d(phi.c1.conj() * psi.c2)
    return r1, r2


# --- gauges -----------------------------------------------------------------

def _exp(f: ComplexField) -> ComplexField:
    return ComplexField(f.spec, np.exp(f.data))


def apply_gauge(psi: SpinorField, phi: SpinorField, g: GaugeFunction | ComplexField) -> tuple[SpinorField, SpinorField]:
    f = g.f if isinstance(g, GaugeFunction) else g
    same_grid(f, psi.c1, phi.c1)
    ef, efb = _exp(f), _exp(f.conj())
    return (
        SpinorField(ef * psi.c1, efb * psi.c2),
        SpinorField(_exp(-f) * phi.c1, _exp(-f.conj()) * phi.c2),
    )


def gauge_potential(p, g: GaugeFunction | ComplexField, tol: float = 1e-10) -> SurfacePotential:
    """Potential ``P = p e^(conj f - f)`` for a holomorphic gauge ``f``."""
    p = _potential(p)
    f = g.f if isinstance(g, GaugeFunction) else g
    same_grid(p, f)
    err = apply_dbar(f).max_abs()
    if err > tol * max(1.0, f.max_abs()):
        raise GaugeNotHolomorphicError(f"dbar f has max {err:.3e}; gauge must be holomorphic")
    return SurfacePotential(p * _exp(f.conj() - f))


def gauge_jets(psi: tuple[Jet, Jet], phi: tuple[Jet, Jet], f: Jet):
    """Closed-form gauge action on jets (any f, holomorphic or not)."""
    fb = f.conj()
    return (
        (f.exp() * psi[0], fb.exp() * psi[1]),
        ((-f).exp() * phi[0], (-fb).exp() * phi[1]),
    )


# --- lifts ------------------------------------------------------------------

def _require_smooth(f: ComplexField, name: str, rtol: float = 1e-6):
    hat = np.abs(np.fft.fft2(f.data))
    total = hat.sum()
    if total == 0:
        return
    high = hat[~f.spec.two_thirds_mask].sum()
    if high > rtol * total:
        raise InvalidParameterError(
            f"{name} is not a smooth periodic field (high-band spectral fraction {high / total:.2e}); "
            "winding angles are not accepted"
        )


def lift_from_angles(angles: LiftAngles) -> tuple[GaugeFunction, SurfacePotential, SpinorField]:
    """Build a Dirac spinor from the lift (e^{i theta} cos eta, sin eta).

    Solves ``dbar f = -i (dbar theta) cos^2 eta`` for zero-mean ``f`` and
    returns ``(f, p, psi)`` with ``psi = (e^{f + i theta} cos eta, e^{conj f} sin eta)``.
    """
    theta = angles.theta.real.astype(complex)
    eta = angles.eta.real.astype(complex)
    spec = angles.theta.spec
    theta, eta = spec.field(theta), spec.field(eta)
    _require_smooth(theta, "theta")
    _require_smooth(eta, "eta")
    cos, sin = ComplexField(spec, np.cos(eta.data)), ComplexField(spec, np.sin(eta.data))
    f = invert_dbar(-1j * apply_dbar(theta) * cos * cos)
    p = -_exp(f.conj() - f - 1j * theta) * (1j * apply_d(theta) * sin * cos + apply_d(eta))
    psi = SpinorField(_exp(f + 1j * theta) * cos, _exp(f.conj()) * sin)
    return GaugeFunction(f), SurfacePotential(p), psi


# --- catalog ----------------------------------------------------------------

JetMap = dict[str, Jet]


@dataclass(frozen=True)
class CatalogSolution:
    """Exact Dirac pair with closed-form derivatives.

    Iterating yields ``(potential, psi, phi)``.
    """

    kind: str
    params: dict
    p: SurfacePotential
    psi: SpinorField
    phi: SpinorField
    closed_form: Callable[[np.ndarray], JetMap]

    def __iter__(self):
        yield self.p
        yield self.psi
        yield self.phi

    def jets(self, z) -> JetMap:
        """Closed-form values and derivatives of p, psi1, psi2, phi1, phi2 at points ``z``."""
        return self.closed_form(np.asarray(z, dtype=complex))


def _sample(spec: GridSpec, jets: JetMap) -> tuple[SurfacePotential, SpinorField, SpinorField]:
    return (
        SurfacePotential(spec.field(jets["p"].value)),
        SpinorField(spec.field(jets["psi1"].value), spec.field(jets["psi2"].value)),
        SpinorField(spec.field(jets["phi1"].value), spec.field(jets["phi2"].value)),
    )


def _on_lattice(spec: GridSpec, k: complex, tol: float = 1e-9) -> bool:
    # exp(i(kz + conj(k) zbar)) = exp(2i (Re k x - Im k y))
    nx = 2 * k.real * spec.lx / (2 * np.pi)
    ny = 2 * k.imag * spec.ly / (2 * np.pi)
    return abs(nx - round(nx)) < tol and abs(ny - round(ny)) < tol


def _plane(spec, params):
    def jets(z):
        one, zero = Jet.const(1.0, z), Jet.const(0.0, z)
        return {"p": zero, "psi1": one, "psi2": zero, "phi1": one, "phi2": zero}
    return jets


def _wave(spec, params):
    c = float(params.get("c", 1.0))
    k = complex(params.get("k", 1.0))
    m = complex(params.get("m", k))
    if c <= 0:
        raise InvalidParameterError("wave amplitude c must be positive")
    for name, vec in (("k", k), ("m", m)):
        if abs(abs(vec) - c) > 1e-12 * max(1.0, c):
            raise InvalidParameterError(f"|{name}| = {abs(vec)} but the dispersion relation forces |{name}| = c = {c}")
        if not _on_lattice(spec, vec):
            raise InvalidParameterError(f"wave vector {name}={vec} is not on the dual lattice of {spec}")

    def jets(z):
        zj, zbj = Jet.z(z), Jet.zbar(z)
        psi1 = (1j * (k * zj + np.conj(k) * zbj)).exp()
        phi1 = (1j * (m * zj + np.conj(m) * zbj)).exp()
        return {
            "p": Jet.const(c, z),
            "psi1": psi1,
            "psi2": psi1 * (1j * np.conj(k) / c),
            "phi1": phi1,
            "phi2": phi1 * (1j * np.conj(m) / c),
        }
    return jets


def _gauged_wave(spec, params):
    base = _wave(spec, params)
    f0 = complex(params.get("f", 0.3j))

    def jets(z):
        j = base(z)
        fj = Jet.const(f0, z)
        (k1, k2), (t1, t2) = gauge_jets((j["psi1"], j["psi2"]), (j["phi1"], j["phi2"]), fj)
        return {"p": j["p"] * (fj.conj() - fj).exp(), "psi1": k1, "psi2": k2, "phi1": t1, "phi2": t2}
    return jets


def _ridge(spec, params):
    """Lift with constant eta and theta varying along one lattice direction.

    With eta = eta0 constant the dbar constraint integrates in closed form,
    f = -i cos^2(eta0) theta, which gives a smooth non-constant potential.
    The second spinor is the lift of -theta, rotated by a constant gauge so
    that it solves Dtilde with the same potential.
    """
    a = float(params.get("amplitude", 0.5))
    mode = int(params.get("mode", 1))
    na, nb = (int(v) for v in params.get("direction", (1, 0)))
    eta0 = float(params.get("eta0", np.pi / 4))
    if (na, nb) == (0, 0) or mode == 0:
        raise InvalidParameterError("ridge needs a nonzero direction and mode")
    sigma = np.pi * (na / spec.lx - 1j * nb / spec.ly)  # d(s) for s = sigma z + conj(sigma) zbar
    cc, ss = np.cos(eta0), np.sin(eta0)
    C = cc**2
    beta = np.angle(sigma)

    def jets(z):
        s = sigma * Jet.z(z) + np.conj(sigma) * Jet.zbar(z)
        theta = a * (mode * s).sin()
        dtheta = (a * mode * sigma) * (mode * s).cos()
        psi1 = cc * (1j * (1 - C) * theta).exp()
        psi2 = ss * (1j * C * theta).exp()
        p = (-1j * ss * cc) * dtheta * (1j * (2 * C - 1) * theta).exp()
        phi1 = (cc * np.exp(1j * beta)) * (-1j * (1 - C) * theta).exp()
        phi2 = (ss * np.exp(-1j * beta)) * (-1j * C * theta).exp()
        return {"p": p, "psi1": psi1, "psi2": psi2, "phi1": phi1, "phi2": phi2}
    return jets


_CATALOG = {"plane": _plane, "wave": _wave, "gauged_wave": _gauged_wave, "ridge": _ridge}
CATALOG_KINDS = tuple(_CATALOG)


def catalog_solution(kind: str, spec: GridSpec, **params) -> CatalogSolution:
    """Exact solutions of the Dirac pair.

    kinds: ``plane`` (p = 0, psi = phi = (1, 0)); ``wave`` (p = c, plane waves
    with |k| = |m| = c); ``gauged_wave`` (wave under constant gauge ``f``);
    ``ridge`` (non-constant potential from a one-directional lift).
    """
    if kind not in _CATALOG:
        raise InvalidParameterError(f"unknown catalog kind {kind!r}; choose from {CATALOG_KINDS}")
    closed = _CATALOG[kind](spec, params)
    p, psi, phi = _sample(spec, closed(spec.z))
    return CatalogSolution(kind, dict(params), p, psi, phi, closed)
