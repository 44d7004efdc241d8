"""Gauss map of a surface in R^4 through the quadric Q2 = CP^1 x CP^1.

Oriented two-planes in R^4 are points ``[z]`` of the quadric
``z1^2 + z2^2 + z3^2 + z4^2 = 0`` in CP^3.  The map ``sigma`` parametrizes the
quadric by two affine coordinates ``(w1, w2)``; for a conformal immersion the
tangent vector ``X_z`` lies on the quadric and ``sigma^{-1}(X_z)`` splits the
Gauss map into two CP^1 factors.

All functions accept scalars or arrays; the leading axis of a homogeneous
coordinate array has length 4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError, InvalidParameterError, SingularChartError
from .grid import ComplexField
from .spinor import SpinorField
from .weierstrass import SurfaceR4, surface_tangent


@dataclass(frozen=True)
class QuadricPoint:
    z: np.ndarray
    tol: float | None = 1e-10

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        if z.shape[:1] != (4,):
            raise InvalidParameterError(f"quadric points need 4 homogeneous coordinates, got shape {z.shape}")
        object.__setattr__(self, "z", z)
        norm2 = np.sum(np.abs(z) ** 2, axis=0)
        if np.any(norm2 == 0):
            raise InvalidParameterError("homogeneous coordinates cannot all vanish")
        if self.tol is not None:
            res = np.abs(quadric_residual(z)) / norm2
            if np.any(res > self.tol):
                raise InvalidParameterError(f"point is off the quadric (relative residual {res.max():.3e})")


@dataclass(frozen=True)
class ProductPoint:
    w1: np.ndarray | complex
    w2: np.ndarray | complex

    def __post_init__(self):
        if not (np.all(np.isfinite(self.w1)) and np.all(np.isfinite(self.w2))):
            raise InvalidParameterError("w1 and w2 must be finite")


def quadric_residual(z) -> np.ndarray | complex:
    z = np.asarray(z, dtype=complex)
    return np.sum(z * z, axis=0)


def sigma(w: ProductPoint) -> QuadricPoint:
    w1, w2 = np.asarray(w.w1, dtype=complex), np.asarray(w.w2, dtype=complex)
    z = np.stack([1 + w1 * w2, 1j * (1 - w1 * w2), w1 - w2, -1j * (w1 + w2)])
    return QuadricPoint(z, tol=None)


def sigma_inverse(zp: QuadricPoint, chart_tol: float = 1e-12) -> ProductPoint:
    """Affine coordinates of a quadric point; needs ``z1 - i z2 != 0``."""
    z1, z2, z3, z4 = zp.z
    den = z1 - 1j * z2
    scale = np.sqrt(np.sum(np.abs(zp.z) ** 2, axis=0))
    bad = np.abs(den) <= chart_tol * scale
    if np.any(bad):
        idx = tuple(int(v) for v in np.argwhere(np.atleast_1d(bad))[0]) if np.ndim(bad) else ()
        raise SingularChartError(f"z1 - i z2 vanishes (index {idx}); point lies outside the chart")
    return ProductPoint((z3 + 1j * z4) / den, (-z3 + 1j * z4) / den)


def coordinate_change_y_to_z(y) -> np.ndarray:
    """Linear change under which the quadric reads ``y1 y2 = y3 y4``."""
    y1, y2, y3, y4 = np.asarray(y, dtype=complex)
    return np.stack([0.5j * (y1 + y2), 0.5 * (y1 - y2), 0.5 * (y3 + y4), 0.5j * (y3 - y4)])


def q2_metric_eval(w: ProductPoint, dw1: complex, dw2: complex):
    """Product Fubini-Study metric ``2|dw1|^2/(1+|w1|^2)^2 + 2|dw2|^2/(1+|w2|^2)^2``."""
    a = 2 * np.abs(dw1) ** 2 / (1 + np.abs(w.w1) ** 2) ** 2
    b = 2 * np.abs(dw2) ** 2 / (1 + np.abs(w.w2) ** 2) ** 2
    return a + b


def projective_distance(a, b) -> np.ndarray | float:
    """Chordal Fubini-Study distance ``sin(angle)`` between ``[a]`` and ``[b]``.

    Computed from the wedge product so that nearly equal points do not lose
    half their digits to cancellation.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    nb = np.sqrt(np.sum(np.abs(b) ** 2, axis=0))
    wedge2 = 0.0
    n = a.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            wedge2 = wedge2 + np.abs(a[i] * b[j] - a[j] * b[i]) ** 2
    return np.sqrt(wedge2) / (na * nb)


def cp1_distance(w, v) -> np.ndarray | float:
    """Chordal distance between affine points of CP^1."""
    w, v = np.asarray(w, dtype=complex), np.asarray(v, dtype=complex)
    return np.abs(w - v) / np.sqrt((1 + np.abs(w) ** 2) * (1 + np.abs(v) ** 2))


def real_pair_defect(zp: QuadricPoint) -> tuple[np.ndarray, np.ndarray]:
    """For unit ``z = A + iB`` return ``||A| - |B||`` and ``|A.B|``; both vanish on the quadric."""
    z = zp.z / np.sqrt(np.sum(np.abs(zp.z) ** 2, axis=0))
    A, B = z.real, z.imag
    na = np.sqrt(np.sum(A * A, axis=0))
    nb = np.sqrt(np.sum(B * B, axis=0))
    return np.abs(na - nb), np.abs(np.sum(A * B, axis=0))


# --- Gauss map of a surface ------------------------------------------------------

def gauss_map_from_tangent(
    tangent, quadric_tol: float = 1e-8, degenerate_tol: float = 1e-12
) -> tuple[ComplexField, ComplexField, float]:
    """``sigma^{-1}`` of the tangent field ``(X^1_z, ..., X^4_z)``.

    Returns ``(w1, w2, max relative quadric residual)``.
    """
    spec = tangent[0].spec
    z = np.stack([t.data for t in tangent])
    norm2 = np.sum(np.abs(z) ** 2, axis=0)
    scale = norm2.max()
    small = norm2 <= degenerate_tol * max(scale, 1e-300)
    if np.any(small):
        i, j = (int(v) for v in np.argwhere(small)[0])
        raise DegeneratePointError(f"tangent vector X_z vanishes at sample ({i}, {j})", (i, j))
    rel = np.abs(quadric_residual(z)) / norm2
    worst = float(rel.max())
    if worst > quadric_tol:
        i, j = (int(v) for v in np.unravel_index(np.argmax(rel), rel.shape))
        raise DegeneratePointError(
            f"X_z is off the quadric at sample ({i}, {j}) (relative residual {worst:.3e})", (i, j)
        )
    den = z[0] - 1j * z[1]
    chart = np.abs(den) <= 1e-10 * np.sqrt(norm2)
    if np.any(chart):
        i, j = (int(v) for v in np.argwhere(chart)[0])
        raise DegeneratePointError(f"X_z leaves the chart z1 - i z2 != 0 at sample ({i}, {j})", (i, j))
    w = sigma_inverse(QuadricPoint(z, tol=None))
    return ComplexField(spec, w.w1), ComplexField(spec, w.w2), worst


def gauss_map_of_surface(surface: SurfaceR4, quadric_tol: float = 1e-8) -> tuple[ComplexField, ComplexField]:
    w1, w2, _ = gauss_map_from_tangent(_tangent(surface), quadric_tol)
    return w1, w2


def _tangent(surface: SurfaceR4):
    periods = surface.periods if surface.periods is not None else np.zeros((4, 2))
    return surface_tangent(surface, periods)[0]


def gauss_consistency(w1: ComplexField, w2: ComplexField, tangent) -> float:
    """Max projective distance between ``sigma(w1, w2)`` and ``X_z``."""
    zs = sigma(ProductPoint(w1.data, w2.data)).z
    xz = np.stack([t.data for t in tangent])
    return float(np.max(projective_distance(zs, xz)))


RATIO_FAMILIES = {
    # w1 from psi, w2 from phi, with the phases that sigma^{-1} produces
    "psi2bar_over_psi1": lambda a1, a2, b1, b2: (-1j * a2.conj() / a1, 1j * b2.conj() / b1),
    # the same ratios with the two factors exchanged
    "swapped": lambda a1, a2, b1, b2: (1j * b2.conj() / b1, -1j * a2.conj() / a1),
    # inverted ratios psi1 / conj(psi2)
    "psi1_over_psi2bar": lambda a1, a2, b1, b2: (a1 / a2.conj(), b1 / b2.conj()),
}


def ratio_family_finding(psi: SpinorField, phi: SpinorField, w1: ComplexField, w2: ComplexField, tol: float = 1e-8) -> dict:
    """Compare candidate spinor ratios against the Gauss map coordinates.

    Reports, for each candidate family, the max CP^1 chordal distance to
    ``(w1, w2)`` and the sorted list of families that match within ``tol``.
    Samples where a denominator vanishes count as a mismatch.
    """
    errors = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        for name, fam in RATIO_FAMILIES.items():
            a, b = fam(psi.c1.data, psi.c2.data, phi.c1.data, phi.c2.data)
            err = float(np.max(np.maximum(cp1_distance(a, w1.data), cp1_distance(b, w2.data))))
            errors[name] = err if np.isfinite(err) else float("inf")
    return {"errors": errors, "matching": sorted(k for k, v in errors.items() if v < tol)}


def surface_gauss_report(surface: SurfaceR4, psi: SpinorField, phi: SpinorField) -> dict:
    """Quadric residual, sigma consistency and ratio finding for one surface."""
    xz = _tangent(surface)
    w1, w2, quad = gauss_map_from_tangent(xz)
    return {
        "quadric_residual_max": quad,
        "sigma_consistency": gauss_consistency(w1, w2, xz),
        "ratio_family": ratio_family_finding(psi, phi, w1, w2),
    }
