"""Periodic rectangular grid with spectral complex calculus.

The computational domain is the flat torus [0, lx) x [0, ly).  Sample
``(i, j)`` sits at ``z = i*lx/nx + 1j * j*ly/ny``, so axis 0 of every data
array runs along x and axis 1 along y.

Derivatives use the Wirtinger operators

    d    = (d/dx - i d/dy) / 2
    dbar = (d/dx + i d/dy) / 2

evaluated in Fourier space.  The Nyquist wavenumber is dropped from the
first-derivative symbols so that derivatives of real data stay real.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import GridMismatchError, InvalidFieldError, UnsolvableConstraintError

DEFAULT_SOLVABILITY_RTOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    lx: float = 2 * np.pi
    ly: float = 2 * np.pi

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if int(n) != n or n < 8 or n % 2:
                raise ValueError(f"sample counts must be even integers >= 8, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("domain lengths must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @cached_property
    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    @cached_property
    def z(self) -> np.ndarray:
        x, y = self.xy
        return x + 1j * y

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Angular wavenumbers (kx, ky) broadcast to the grid shape."""
        kx = 2 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)
        ky = 2 * np.pi * np.fft.fftfreq(self.ny, d=self.dy)
        return np.meshgrid(kx, ky, indexing="ij")

    @cached_property
    def _first_derivative_k(self) -> tuple[np.ndarray, np.ndarray]:
        kx, ky = (k.copy() for k in self.wavenumbers)
        kx[self.nx // 2, :] = 0.0
        ky[:, self.ny // 2] = 0.0
        return kx, ky

    @cached_property
    def d_symbol(self) -> np.ndarray:
        kx, ky = self._first_derivative_k
        return 0.5 * (1j * kx + ky)

    @cached_property
    def dbar_symbol(self) -> np.ndarray:
        kx, ky = self._first_derivative_k
        return 0.5 * (1j * kx - ky)

    @cached_property
    def two_thirds_mask(self) -> np.ndarray:
        mx = np.abs(np.fft.fftfreq(self.nx) * self.nx) < self.nx / 3
        my = np.abs(np.fft.fftfreq(self.ny) * self.ny) < self.ny / 3
        return np.outer(mx, my)

    def field(self, data) -> "ComplexField":
        return ComplexField(self, np.broadcast_to(np.asarray(data, dtype=complex), self.shape).copy())

    def zeros(self) -> "ComplexField":
        return ComplexField(self, np.zeros(self.shape, dtype=complex))

    def from_function(self, fn) -> "ComplexField":
        """Sample ``fn(x, y)`` on the grid."""
        x, y = self.xy
        return self.field(fn(x, y))


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on a periodic grid.  Immutable by convention."""

    spec: GridSpec
    data: np.ndarray = field(repr=False)

    __array_ufunc__ = None

    def __post_init__(self):
        if self.data.shape != self.spec.shape:
            raise InvalidFieldError(f"data shape {self.data.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(self.data)):
            raise InvalidFieldError("field contains non-finite samples")

    def _other(self, other):
        if isinstance(other, ComplexField):
            if other.spec != self.spec:
                raise GridMismatchError(f"{self.spec} vs {other.spec}")
            return other.data
        return other

    def __add__(self, other):
        return ComplexField(self.spec, self.data + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ComplexField(self.spec, self.data - self._other(other))

    def __rsub__(self, other):
        return ComplexField(self.spec, self._other(other) - self.data)

    def __mul__(self, other):
        return ComplexField(self.spec, self.data * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ComplexField(self.spec, self.data / self._other(other))

    def __neg__(self):
        return ComplexField(self.spec, -self.data)

    def conj(self) -> "ComplexField":
        return ComplexField(self.spec, self.data.conj())

    @property
    def real(self) -> np.ndarray:
        return self.data.real

    @property
    def imag(self) -> np.ndarray:
        return self.data.imag

    def abs2(self) -> "ComplexField":
        return ComplexField(self.spec, (self.data * self.data.conj()).real.astype(complex))

    def mean(self) -> complex:
        return complex(self.data.mean())

    def max_abs(self) -> float:
        return float(np.abs(self.data).max())


def _check(f: ComplexField) -> ComplexField:
    if not isinstance(f, ComplexField):
        raise InvalidFieldError(f"expected ComplexField, got {type(f).__name__}")
    return f


def same_grid(*fields: ComplexField) -> GridSpec:
    spec = fields[0].spec
    for f in fields[1:]:
        if f.spec != spec:
            raise GridMismatchError(f"{spec} vs {f.spec}")
    return spec


def _apply_symbol(f: ComplexField, symbol: np.ndarray) -> ComplexField:
    return ComplexField(f.spec, np.fft.ifft2(symbol * np.fft.fft2(f.data)))


def apply_d(f: ComplexField) -> ComplexField:
    """Spectral d/dz."""
    f = _check(f)
    return _apply_symbol(f, f.spec.d_symbol)


def apply_dbar(f: ComplexField) -> ComplexField:
    """Spectral d/dzbar."""
    f = _check(f)
    return _apply_symbol(f, f.spec.dbar_symbol)


def apply_d_n(f: ComplexField, n: int) -> ComplexField:
    return _apply_symbol(_check(f), f.spec.d_symbol**n)


def apply_dbar_n(f: ComplexField, n: int) -> ComplexField:
    return _apply_symbol(_check(f), f.spec.dbar_symbol**n)


def laplacian(f: ComplexField) -> ComplexField:
    """Flat Laplacian with the full (untruncated) symbol -(kx^2 + ky^2)."""
    kx, ky = f.spec.wavenumbers
    return _apply_symbol(_check(f), -(kx**2 + ky**2))


def _invert(rhs: ComplexField, symbol: np.ndarray, rtol: float, name: str) -> ComplexField:
    rhs = _check(rhs)
    scale = rhs.max_abs()
    mean = abs(rhs.mean())
    if mean > rtol * scale:
        raise UnsolvableConstraintError(
            f"{name} constraint: right side has mean {mean:.3e} (max |rhs| {scale:.3e}); "
            "constants are not in the range of the operator on the torus"
        )
    hat = np.fft.fft2(rhs.data)
    out = np.zeros_like(hat)
    nz = symbol != 0
    out[nz] = hat[nz] / symbol[nz]
    return ComplexField(rhs.spec, np.fft.ifft2(out))


def invert_dbar(rhs: ComplexField, rtol: float = DEFAULT_SOLVABILITY_RTOL) -> ComplexField:
    """Zero-mean solution v of dbar v = rhs."""
    return _invert(rhs, rhs.spec.dbar_symbol, rtol, "dbar")


def invert_d(rhs: ComplexField, rtol: float = DEFAULT_SOLVABILITY_RTOL) -> ComplexField:
    """Zero-mean solution w of d w = rhs."""
    return _invert(rhs, rhs.spec.d_symbol, rtol, "d")


def dealias(f: ComplexField) -> ComplexField:
    """Two-thirds-rule spectral truncation."""
    return _apply_symbol(_check(f), f.spec.two_thirds_mask)


def integrate_area(f: ComplexField, convention: Literal["dxdy", "dz_wedge_dzbar"] = "dxdy") -> complex:
    """Trapezoid quadrature over the torus.

    ``dz_wedge_dzbar`` uses dz ^ dzbar = -2i dx ^ dy.
    """
    f = _check(f)
    total = complex(f.data.sum() * f.spec.dx * f.spec.dy)
    if convention == "dxdy":
        return total
    if convention == "dz_wedge_dzbar":
        return -2j * total
    raise ValueError(f"unknown measure convention {convention!r}")


# CSV layout: one header row carrying the grid, then nx rows of ny "re,im" cells.

def _fmt(v: complex) -> str:
    return f"{v.real!r},{v.imag!r}"


def fields_to_csv(fields: list[ComplexField]) -> str:
    spec = same_grid(*fields)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"nx={spec.nx}", f"ny={spec.ny}", f"lx={spec.lx!r}", f"ly={spec.ly!r}", f"blocks={len(fields)}"])
    for f in fields:
        for row in f.data:
            w.writerow([_fmt(complex(v)) for v in row])
    return buf.getvalue()


def fields_from_csv(text: str) -> list[ComplexField]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InvalidFieldError("empty field CSV")
    try:
        head = dict(cell.split("=", 1) for cell in rows[0])
        spec = GridSpec(int(head["nx"]), int(head["ny"]), float(head["lx"]), float(head["ly"]))
        blocks = int(head.get("blocks", 1))
    except (KeyError, ValueError) as exc:
        raise InvalidFieldError(f"bad field CSV header: {rows[0]}") from exc
    body = [r for r in rows[1:] if r]
    if len(body) != blocks * spec.nx:
        raise InvalidFieldError(f"expected {blocks * spec.nx} data rows, found {len(body)}")
    out = []
    for b in range(blocks):
        block = body[b * spec.nx:(b + 1) * spec.nx]
        data = np.array([[complex(*map(float, cell.split(","))) for cell in row] for row in block])
        out.append(ComplexField(spec, data))
    return out


def random_bandlimited(spec: GridSpec, rng: np.random.Generator, kmax: int = 3, amplitude: float = 1.0) -> ComplexField:
    """Random trigonometric polynomial with integer modes |m_x|, |m_y| <= kmax."""
    hat = np.zeros(spec.shape, dtype=complex)
    m = np.arange(-kmax, kmax + 1)
    coeffs = rng.standard_normal((m.size, m.size)) + 1j * rng.standard_normal((m.size, m.size))
    hat[np.ix_(m % spec.nx, m % spec.ny)] = coeffs
    data = np.fft.ifft2(hat)
    return ComplexField(spec, amplitude * data / np.abs(data).max())


def random_smooth(spec: GridSpec, seed: int, width: float = 1.5, mmax: int = 20, amplitude: float = 1.0) -> ComplexField:
    """Seeded random trigonometric series with Gaussian spectral envelope.

    The series is defined independently of the grid, so the same seed gives
    the same continuous function at every resolution.  Coefficients decay like
    exp(-|m|^2 / (2 width^2)); ``amplitude`` bounds the sup norm.
    """
    rng = np.random.default_rng(seed)
    m = np.arange(-mmax, mmax + 1)
    mx, my = np.meshgrid(m, m, indexing="ij")
    coeffs = (rng.standard_normal(mx.shape) + 1j * rng.standard_normal(mx.shape)) * np.exp(
        -(mx**2 + my**2) / (2 * width**2)
    )
    ex = np.exp(2j * np.pi * np.outer(np.arange(spec.nx) / spec.nx, m))
    ey = np.exp(2j * np.pi * np.outer(np.arange(spec.ny) / spec.ny, m))
    return ComplexField(spec, amplitude * (ex @ coeffs @ ey.T) / np.abs(coeffs).sum())
