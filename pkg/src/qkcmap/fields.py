"""Evaluable tensor fields on a coordinate chart.

A field is a program ``eval(x)`` that maps a coordinate sequence over any
scalar ring (floats or :class:`~qkcmap.jets.Jet2`) to nested component
lists.  Component layout by valence:

=========  ===============  ==========================
valence    shape            meaning
=========  ===============  ==========================
scalar     ()               f
vector     (d,)             X^i
covector   (d,)             a_i
sym2       (d, d)           h_ij, symmetric
form       (d,)*p           w_{i1..ip}, antisymmetric
endo       (d, d)           T^i_j  (row = upper index)
=========  ===============  ==========================

Two-forms use the determinant convention: ``w(X, Y) = X^i Y^j w_ij`` and
``(d a)_ij = d_i a_j - d_j a_i``, so Cartan's formula holds with
``(i_X w)_j = X^i w_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .jets import Jet2, seed

VALENCES = ("scalar", "vector", "covector", "sym2", "form", "endo")

_CHART_DIMS: dict[str, int] = {}


def register_chart(chart_id: str, dim: int) -> None:
    known = _CHART_DIMS.get(chart_id)
    if known is not None and known != dim:
        raise ValueError(f"chart {chart_id!r} already registered with dim {known}")
    _CHART_DIMS[chart_id] = dim


@dataclass(frozen=True)
class Point:
    chart_id: str
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float).reshape(-1)
        object.__setattr__(self, "coords", coords)
        dim = _CHART_DIMS.get(self.chart_id)
        if dim is not None and dim != coords.shape[0]:
            raise ValueError(
                f"chart {self.chart_id!r} has dim {dim}, got {coords.shape[0]} coords"
            )


def as_coords(p) -> np.ndarray:
    if isinstance(p, Point):
        return p.coords
    return np.asarray(p, dtype=float).reshape(-1)


@dataclass(frozen=True)
class TensorFieldSpec:
    dim: int
    valence: str
    eval: Callable[[Sequence[Any]], Any]
    degree: int = 0
    domain: Optional[Callable[[np.ndarray], bool]] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.valence not in VALENCES:
            raise ValueError(f"unknown valence {self.valence!r}")
        if self.valence == "form" and self.degree < 1:
            raise ValueError("form fields need degree >= 1")

    @property
    def shape(self) -> tuple[int, ...]:
        d = self.dim
        return {
            "scalar": (),
            "vector": (d,),
            "covector": (d,),
            "sym2": (d, d),
            "endo": (d, d),
        }.get(self.valence, (d,) * self.degree)

    def check_domain(self, x: np.ndarray) -> None:
        if x.shape[0] != self.dim:
            raise DomainError(f"{self.name or 'field'} expects {self.dim} coords, got {x.shape[0]}")
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite coordinates")
        if self.domain is not None and not self.domain(x):
            raise DomainError(f"{self.name or 'field'}: point {x} outside chart domain")

    def values(self, p) -> np.ndarray:
        x = as_coords(p)
        self.check_domain(x)
        out = np.asarray(self.eval(list(x)), dtype=float)
        return out.reshape(self.shape)

    def jets(self, p) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Value, gradient and Hessian arrays; derivative axes are appended last."""
        x = as_coords(p)
        self.check_domain(x)
        return components_to_arrays(self.eval(seed(x)), self.shape, self.dim)

    def __call__(self, p) -> np.ndarray:
        return self.values(p)


def components_to_arrays(out, shape, d):
    arr = np.empty(shape, dtype=object)
    arr[...] = _nested(out, shape)
    val = np.zeros(shape)
    grad = np.zeros(shape + (d,))
    hess = np.zeros(shape + (d, d))
    for idx in np.ndindex(*shape):
        c = arr[idx]
        if isinstance(c, Jet2):
            val[idx] = c.v
            grad[idx] = c.g
            hess[idx] = c.h
        else:
            val[idx] = float(c)
    return val, grad, hess


def _nested(out, shape):
    # np.asarray on lists of jets would try to treat them as scalars already,
    # but numpy arrays of floats need to pass through unchanged.
    if isinstance(out, np.ndarray) and out.dtype != object:
        return out.reshape(shape)
    if not shape:
        return out
    res = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        c = out
        for i in idx:
            c = c[i]
        res[idx] = c
    return res


@dataclass(frozen=True)
class ChartMap:
    """A smooth map between charts, given as a ring program."""

    dim_in: int
    dim_out: int
    eval: Callable[[Sequence[Any]], Sequence[Any]]
    name: str = ""

    def values(self, p) -> np.ndarray:
        x = as_coords(p)
        return np.array([float(c) if not isinstance(c, Jet2) else c.v for c in self.eval(list(x))])

    def jacobian(self, p) -> tuple[np.ndarray, np.ndarray]:
        """Image point and Jacobian ``D[a, i] = d phi^a / d x^i``."""
        x = as_coords(p)
        if x.shape[0] != self.dim_in:
            raise DomainError(f"map expects {self.dim_in} coords, got {x.shape[0]}")
        val, grad, _ = components_to_arrays(self.eval(seed(x)), (self.dim_out,), self.dim_in)
        return val, grad


def make_field(dim, valence, fn, *, degree=0, domain=None, name="") -> TensorFieldSpec:
    return TensorFieldSpec(dim=dim, valence=valence, eval=fn, degree=degree, domain=domain, name=name)


def constant_field(values, valence: str, *, degree: int = 0, name: str = "") -> TensorFieldSpec:
    values = np.asarray(values, dtype=float)
    dim = values.shape[0] if values.ndim else 1
    frozen = values.copy()
    return TensorFieldSpec(dim, valence, lambda x: frozen, degree=degree, name=name)


def linear_vector_field(A, *, name: str = "") -> TensorFieldSpec:
    """X^i(x) = A^i_j x^j."""
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    rows = [[(j, float(A[i, j])) for j in range(d) if A[i, j] != 0.0] for i in range(d)]

    def fn(x):
        return [sum((a * x[j] for j, a in row), 0.0) for row in rows]

    return TensorFieldSpec(d, "vector", fn, name=name)


def combine(fields: Sequence[TensorFieldSpec], coeffs: Sequence[float], *, name: str = "") -> TensorFieldSpec:
    """Pointwise real linear combination of same-valence fields."""
    first = fields[0]
    shape = first.shape

    def fn(x):
        acc = np.zeros(shape, dtype=object)
        acc[...] = 0.0
        for f, a in zip(fields, coeffs):
            if a == 0.0:
                continue
            acc = acc + a * _nested(f.eval(x), shape)
        return acc

    return TensorFieldSpec(first.dim, first.valence, fn, degree=first.degree, domain=first.domain, name=name)
