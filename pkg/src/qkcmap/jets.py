"""Second-order forward jets.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar function
of ``d`` chart coordinates.  Arithmetic on jets applies the first and second
order chain/Leibniz rules, so any program written against the ring
operations (``+ - * /``, integer powers and the functions in this module)
returns exact derivatives when fed seeded coordinate jets.

The module-level functions :func:`sqrt`, :func:`log`, :func:`exp`,
:func:`sin`, :func:`cos` accept either plain floats or jets, which is what
lets a single field program run over both rings.
"""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np

__all__ = ["Jet2", "seed", "value_of", "sqrt", "log", "exp", "sin", "cos"]


class Jet2:
    __slots__ = ("v", "g", "h")
    # numpy scalars must defer to the reflected jet operators
    __array_ufunc__ = None

    def __init__(self, v: float, g: np.ndarray, h: np.ndarray):
        self.v = float(v)
        self.g = g
        self.h = h

    @classmethod
    def constant(cls, v: float, d: int) -> "Jet2":
        return cls(v, np.zeros(d), np.zeros((d, d)))

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def __repr__(self) -> str:
        return f"Jet2(v={self.v!r}, g={self.g!r}, h={self.h!r})"

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.v + other.v, self.g + other.g, self.h + other.h)
        if isinstance(other, Real):
            return Jet2(self.v + other, self.g, self.h)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.v - other.v, self.g - other.g, self.h - other.h)
        if isinstance(other, Real):
            return Jet2(self.v - other, self.g, self.h)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Real):
            return Jet2(other - self.v, -self.g, -self.h)
        return NotImplemented

    def __neg__(self):
        return Jet2(-self.v, -self.g, -self.h)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet2):
            gg = np.outer(self.g, other.g)
            return Jet2(
                self.v * other.v,
                self.v * other.g + other.v * self.g,
                self.v * other.h + other.v * self.h + gg + gg.T,
            )
        if isinstance(other, Real):
            return Jet2(self.v * other, self.g * other, self.h * other)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.v
        if v == 0.0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        return self._compose(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if isinstance(other, Real):
            return Jet2(self.v / other, self.g / other, self.h / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Real):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, n):
        if isinstance(n, Integral):
            n = int(n)
            if n == 0:
                return Jet2.constant(1.0, self.dim)
            if n == 1:
                return self
            if n == 2:
                return self * self
            if n < 0:
                return (self ** (-n)).reciprocal()
            v = self.v
            return self._compose(v**n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))
        if isinstance(n, Real):
            v = self.v
            if v <= 0.0:
                raise ValueError("non-integer power of a non-positive jet")
            return self._compose(v**n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))
        return NotImplemented

    # -- composition with a scalar function --------------------------------
    def _compose(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Chain rule: returns the jet of f(self) given f, f', f'' at self.v."""
        return Jet2(f0, f1 * self.g, f1 * self.h + f2 * np.outer(self.g, self.g))

    def sqrt(self) -> "Jet2":
        s = math.sqrt(self.v)
        return self._compose(s, 0.5 / s, -0.25 / (s * self.v))

    def log(self) -> "Jet2":
        v = self.v
        return self._compose(math.log(v), 1.0 / v, -1.0 / v**2)

    def exp(self) -> "Jet2":
        e = math.exp(self.v)
        return self._compose(e, e, e)

    def sin(self) -> "Jet2":
        s, c = math.sin(self.v), math.cos(self.v)
        return self._compose(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = math.sin(self.v), math.cos(self.v)
        return self._compose(c, -s, -c)


def seed(x) -> list[Jet2]:
    """Coordinate jets x_i with unit gradient e_i and zero Hessian."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return [Jet2(x[i], eye[i].copy(), zero) for i in range(d)]


def value_of(x) -> float:
    return x.v if isinstance(x, Jet2) else float(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet2) else math.sqrt(x)


def log(x):
    return x.log() if isinstance(x, Jet2) else math.log(x)


def exp(x):
    return x.exp() if isinstance(x, Jet2) else math.exp(x)


def sin(x):
    return x.sin() if isinstance(x, Jet2) else math.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet2) else math.cos(x)
