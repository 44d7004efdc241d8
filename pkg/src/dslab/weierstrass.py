"""Surfaces in R^4 from Dirac spinor pairs.

The one-forms ``eta_k = f_k dz + conj(f_k) dzbar`` built from ``(psi, phi)``
are integrated along grid-aligned paths.  Path integrals use the exact
Fourier antiderivative of each 1D line restriction, so the only error on
band-limited data is roundoff; a cumulative trapezoid rule is available for
comparison.  On the torus a closed form may have nonzero periods around the
two cycles; these are reported as monodromy and carried on the surface.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import (
    DegenerateImmersionError,
    InvalidFieldError,
    InvalidReductionError,
    NonClosedFormError,
)
from .grid import ComplexField, GridSpec, apply_d, apply_dbar, same_grid
from .spinor import SpinorField, SurfacePotential, _potential, dirac_residual

PathOrder = Literal["row", "col"]


@dataclass(frozen=True)
class OneFormSet:
    f1: ComplexField
    f2: ComplexField
    f3: ComplexField
    f4: ComplexField

    def __iter__(self):
        return iter((self.f1, self.f2, self.f3, self.f4))

    def __getitem__(self, k: int) -> ComplexField:
        return (self.f1, self.f2, self.f3, self.f4)[k]

    @property
    def spec(self) -> GridSpec:
        return self.f1.spec


@dataclass(frozen=True)
class SurfaceR4:
    coords: tuple[ComplexField, ComplexField, ComplexField, ComplexField]
    base: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    periods: np.ndarray | None = field(default=None, compare=False)
    imag_tol: float = 1e-10

    def __post_init__(self):
        same_grid(*self.coords)
        for k, X in enumerate(self.coords):
            scale = max(1.0, X.max_abs())
            if np.abs(X.imag).max() > self.imag_tol * scale:
                raise InvalidFieldError(f"coordinate X{k + 1} has imaginary leakage {np.abs(X.imag).max():.3e}")

    @property
    def spec(self) -> GridSpec:
        return self.coords[0].spec

    def real(self) -> np.ndarray:
        """Coordinates as a real (4, nx, ny) array."""
        return np.stack([X.real for X in self.coords])


@dataclass(frozen=True)
class SurfaceGeometry:
    conformal_factor: ComplexField
    mean_curvature: tuple[ComplexField, ...]
    conformality_residual: ComplexField
    curvature_residual: float
    tangent: tuple[ComplexField, ...]


def one_form_coefficients(psi: SpinorField, phi: SpinorField) -> OneFormSet:
    same_grid(psi.c1, phi.c1)
    a = phi.c2.conj() * psi.c2.conj()
    b = phi.c1 * psi.c1
    c = phi.c2.conj() * psi.c1
    d = phi.c1 * psi.c2.conj()
    return OneFormSet(0.5j * (a + b), 0.5 * (a - b), 0.5 * (c + d), 0.5j * (c - d))


def closedness_residual(forms: OneFormSet) -> tuple[ComplexField, ...]:
    """Coefficient of d(eta_k): dbar f_k - d conj(f_k)."""
    return tuple(apply_dbar(f) - apply_d(f.conj()) for f in forms)


# --- path integration -------------------------------------------------------

def _cumulative_spectral(g: np.ndarray, length: float, axis: int) -> np.ndarray:
    """Exact cumulative integral from 0 of periodic samples along ``axis``."""
    n = g.shape[axis]
    h = length / n
    mean = g.mean(axis=axis, keepdims=True)
    k = 2 * np.pi * np.fft.fftfreq(n, d=h)
    k[n // 2] = 0.0
    shape = [1, 1]
    shape[axis] = n
    k = k.reshape(shape)
    hat = np.fft.fft(g - mean, axis=axis)
    inv = np.zeros_like(hat)
    nz = np.broadcast_to(k != 0, hat.shape)
    inv[nz] = (hat / np.where(k == 0, 1.0, 1j * k))[nz]
    G = np.fft.ifft(inv, axis=axis)
    G = G - np.take(G, [0], axis=axis)
    s = (np.arange(n) * h).reshape(shape)
    return G + mean * s


def _cumulative_trapezoid(g: np.ndarray, length: float, axis: int) -> np.ndarray:
    h = length / g.shape[axis]
    return cumulative_trapezoid(g, dx=h, axis=axis, initial=0)


def integrate_complex_form(
    a: ComplexField,
    b: ComplexField,
    order: PathOrder = "row",
    method: Literal["spectral", "trapezoid"] = "spectral",
) -> ComplexField:
    """Integral of ``a dz + b dzbar`` from sample (0, 0) along a grid path.

    ``row`` walks along x at y = 0, then up each column; ``col`` walks along
    y at x = 0, then along each row.
    """
    spec = same_grid(a, b)
    cum = _cumulative_spectral if method == "spectral" else _cumulative_trapezoid
    gx = a.data + b.data           # dz = dx on horizontal legs
    gy = 1j * (a.data - b.data)    # dz = i dy on vertical legs
    if order == "row":
        first = cum(gx[:, :1], spec.lx, axis=0)
        out = first + cum(gy, spec.ly, axis=1)
    elif order == "col":
        first = cum(gy[:1, :], spec.ly, axis=1)
        out = first + cum(gx, spec.lx, axis=0)
    else:
        raise ValueError(f"unknown path order {order!r}")
    return ComplexField(spec, out)


def monodromy(forms: OneFormSet) -> np.ndarray:
    """Periods of each eta_k around the x- and y-cycles, shape (4, 2)."""
    spec = forms.spec
    out = np.zeros((4, 2))
    for k, f in enumerate(forms):
        m = f.mean()
        out[k] = (2 * m.real * spec.lx, -2 * m.imag * spec.ly)
    return out


def max_closedness(forms: OneFormSet) -> float:
    return max(r.max_abs() for r in closedness_residual(forms))


def integrate_surface(
    forms: OneFormSet,
    base=(0.0, 0.0, 0.0, 0.0),
    tol: float = 1e-8,
    order: PathOrder = "row",
    method: Literal["spectral", "trapezoid"] = "spectral",
) -> SurfaceR4:
    scale = max(1.0, max(f.max_abs() for f in forms))
    err = max_closedness(forms)
    if err > tol * scale:
        raise NonClosedFormError(f"closedness residual {err:.3e} exceeds {tol * scale:.3e}")
    base = tuple(float(b) for b in base)
    coords = tuple(integrate_complex_form(f, f.conj(), order, method) + b for f, b in zip(forms, base))
    return SurfaceR4(coords, base, monodromy(forms))


def path_independence(forms: OneFormSet, method: Literal["spectral", "trapezoid"] = "spectral") -> float:
    """Max discrepancy between row-first and column-first path integrals."""
    worst = 0.0
    for f in forms:
        xr = integrate_complex_form(f, f.conj(), "row", method)
        xc = integrate_complex_form(f, f.conj(), "col", method)
        worst = max(worst, float(np.abs(xr.data - xc.data).max()))
    return worst


# --- geometry ---------------------------------------------------------------

def _periodic_part(X: ComplexField, base: float, periods_k) -> ComplexField:
    x, y = X.spec.xy
    linear = base + periods_k[0] / X.spec.lx * x + periods_k[1] / X.spec.ly * y
    return X - linear


def surface_tangent(surface: SurfaceR4, periods: np.ndarray) -> tuple[tuple[ComplexField, ...], tuple[ComplexField, ...]]:
    """Spectral X_z and X_{z zbar} after removing the monodromy ramp."""
    spec = surface.spec
    xz, xzzb = [], []
    for k, X in enumerate(surface.coords):
        per = _periodic_part(X, surface.base[k], periods[k])
        # d of the linear ramp a x + b y is (a - i b) / 2
        slope = 0.5 * (periods[k][0] / spec.lx - 1j * periods[k][1] / spec.ly)
        dX = apply_d(per)
        xz.append(dX + slope)
        xzzb.append(apply_dbar(dX))
    return tuple(xz), tuple(xzzb)


def surface_geometry(
    psi: SpinorField,
    phi: SpinorField,
    surface: SurfaceR4,
    p: SurfacePotential | ComplexField,
    degenerate_tol: float = 1e-12,
) -> SurfaceGeometry:
    p = _potential(p)
    same_grid(psi.c1, phi.c1, p, surface.coords[0])
    u1 = psi.c1.abs2() + psi.c2.abs2()
    u2 = phi.c1.abs2() + phi.c2.abs2()
    e2a = u1 * u2
    bad = np.argwhere(e2a.real <= degenerate_tol)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise DegenerateImmersionError(f"conformal factor vanishes at sample ({i}, {j})", (i, j))
    periods = surface.periods if surface.periods is not None else monodromy(one_form_coefficients(psi, phi))
    xz, xzzb = surface_tangent(surface, periods)
    H = tuple(2.0 * h / e2a for h in xzzb)
    conformality = xz[0] * xz[0] + xz[1] * xz[1] + xz[2] * xz[2] + xz[3] * xz[3]
    Hnorm = np.sqrt(sum(np.abs(h.data) ** 2 for h in H))
    ea = np.sqrt(e2a.real)
    curvature = float(np.abs(np.abs(p.data) - 0.5 * ea * Hnorm).max())
    return SurfaceGeometry(e2a, H, conformality, curvature, xz)


def conformal_factor_mismatch(geom: SurfaceGeometry) -> float:
    """Relative error of 2 |X_z|^2 against e^{2 alpha}."""
    two_xz2 = 2 * sum(np.abs(t.data) ** 2 for t in geom.tangent)
    e2a = geom.conformal_factor.real
    return float(np.abs(two_xz2 - e2a).max() / np.abs(e2a).max())


# --- R^3 reduction ----------------------------------------------------------

def r3_reduction_check(p: SurfacePotential | ComplexField, psi: SpinorField, tol: float = 1e-10) -> dict:
    """Compare the R^4 surface with phi = psi against the R^3 integrals.

    The scalar pair of the R^3 system ``d s = p t, dbar t = -p s`` is
    ``s = psi2, t = -psi1``.
    """
    p = _potential(p)
    if np.abs(p.imag).max() > tol * max(1.0, p.max_abs()):
        raise InvalidReductionError("R^3 reduction needs a real potential")
    forms = one_form_coefficients(psi, psi)
    surf = integrate_surface(forms)
    s, t = psi.c2, -psi.c1
    zp = integrate_complex_form(1j * s.conj() * s.conj(), -1j * t.conj() * t.conj())   # X1 + i X2
    zm = integrate_complex_form(1j * t * t, -1j * s * s)                               # X1 - i X2
    x3 = integrate_complex_form(-(s.conj() * t), -(s * t.conj()))
    rebuilt = (0.5 * (zp + zm), -0.5j * (zp - zm), x3)
    discrepancy = max(float(np.abs(a.data - b.data).max()) for a, b in zip(surf.coords[:3], rebuilt))
    x4 = surf.coords[3].real
    scalar_residual = max(
        (apply_d(s) - p * t).max_abs(),
        (apply_dbar(t) + p * s).max_abs(),
    )
    return {
        "x4_variation": float(x4.max() - x4.min()),
        "r3_discrepancy": discrepancy,
        "r3_system_residual": float(scalar_residual),
        "dirac_residual": dirac_residual(p, psi, "D").max_abs(),
    }


# --- exports ----------------------------------------------------------------

def surface_to_csv(surface: SurfaceR4) -> str:
    x, y = surface.spec.xy
    X = surface.real()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    spec = surface.spec
    w.writerow(["x", "y", "X1", "X2", "X3", "X4"])
    for i in range(spec.nx):
        for j in range(spec.ny):
            w.writerow([repr(float(x[i, j])), repr(float(y[i, j]))] + [repr(float(X[k, i, j])) for k in range(4)])
    return buf.getvalue()


def surface_from_csv(text: str) -> np.ndarray:
    """Read a surface CSV into an (n_rows, 6) array of x, y, X1..X4."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:2] != ["x", "y"]:
        raise InvalidFieldError("surface CSV must start with an x,y,X1..X4 header")
    return np.array([[float(v) for v in r] for r in rows[1:] if r])


def grid_to_obj(points: np.ndarray, nx: int, ny: int, projection=(1, 2, 3)) -> str:
    """OBJ mesh of an (nx*ny, 4) coordinate array, row-major, quads split into triangles."""
    cols = [int(c) - 1 for c in projection]
    if len(cols) != 3 or any(c not in range(4) for c in cols):
        raise ValueError(f"projection must name three of the coordinates 1..4, got {projection}")
    lines = [f"# projection X{cols[0] + 1} X{cols[1] + 1} X{cols[2] + 1}"]
    for pt in points:
        lines.append("v " + " ".join(repr(float(pt[c])) for c in cols))
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j + 1
            b = a + ny
            lines.append(f"f {a} {b} {b + 1}")
            lines.append(f"f {a} {b + 1} {a + 1}")
    return "\n".join(lines) + "\n"


def surface_to_obj(surface: SurfaceR4, projection=(1, 2, 3)) -> str:
    X = surface.real().reshape(4, -1).T
    return grid_to_obj(X, surface.spec.nx, surface.spec.ny, projection)
