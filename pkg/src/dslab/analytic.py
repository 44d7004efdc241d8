"""First-order Wirtinger jets for closed-form pointwise checks.

A :class:`Jet` carries a function value together with its d/dz and d/dzbar
derivatives at a set of points.  Arithmetic follows the product and chain
rules, so closed-form solutions can be pushed through gauges and one-form
formulas without ever touching a grid transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Jet:
    value: np.ndarray
    dz: np.ndarray
    dzb: np.ndarray

    __array_ufunc__ = None  # numpy scalars defer to Jet's reflected operators

    @classmethod
    def const(cls, c, like) -> "Jet":
        shape = np.shape(like)
        return cls(np.full(shape, c, dtype=complex), np.zeros(shape, complex), np.zeros(shape, complex))

    @classmethod
    def z(cls, z) -> "Jet":
        z = np.asarray(z, dtype=complex)
        return cls(z, np.ones_like(z), np.zeros_like(z))

    @classmethod
    def zbar(cls, z) -> "Jet":
        z = np.asarray(z, dtype=complex)
        return cls(z.conj(), np.zeros_like(z), np.ones_like(z))

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.value + other.value, self.dz + other.dz, self.dzb + other.dzb)
        return Jet(self.value + other, self.dz, self.dzb)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.dz, -self.dzb)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(
                self.value * other.value,
                self.dz * other.value + self.value * other.dz,
                self.dzb * other.value + self.value * other.dzb,
            )
        return Jet(self.value * other, self.dz * other, self.dzb * other)

    __rmul__ = __mul__

    def conj(self) -> "Jet":
        # d(conj f) = conj(dbar f)
        return Jet(self.value.conj(), self.dzb.conj(), self.dz.conj())

    def exp(self) -> "Jet":
        e = np.exp(self.value)
        return Jet(e, e * self.dz, e * self.dzb)

    def cos(self) -> "Jet":
        c, s = np.cos(self.value), np.sin(self.value)
        return Jet(c, -s * self.dz, -s * self.dzb)

    def sin(self) -> "Jet":
        c, s = np.cos(self.value), np.sin(self.value)
        return Jet(s, c * self.dz, c * self.dzb)


def exp(j: Jet) -> Jet:
    return j.exp()
