"""Explicit symmetries of the quaternionic Kahler cases.

The solvable group acting on the fibre coordinates ``(rho, phi, zt_I, z^I)``,
its infinitesimal generators, the isometry group of the deformed universal
hypermultiplet, and a numerical rank probe for Killing fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import calculus as calc
from . import jets as jm
from .errors import DomainError, InsufficientSamples
from .fields import ChartMap, TensorFieldSpec, as_coords, make_field
from .geometries import QkMetricCase

KERNEL_RTOL = 1e-8


# -- the group G(n+2) ---------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    lam: float = 0.0
    alpha: float = 0.0
    vt: np.ndarray = field(default_factory=lambda: np.zeros(1))
    v: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        vt = np.asarray(self.vt, dtype=float).reshape(-1)
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if vt.shape != v.shape:
            raise ValueError("vt and v must have the same length")
        object.__setattr__(self, "vt", vt)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def identity(cls, k: int = 0) -> "GroupElement":
        return cls(0.0, 0.0, np.zeros(k + 1), np.zeros(k + 1))

    @property
    def size(self) -> int:
        return self.v.shape[0]

    def as_fibre_point(self) -> np.ndarray:
        """The orbit image of (rho, phi, zt, z) = (1, 0, 0, 0), i.e. the element itself."""
        return _pack(math.exp(self.lam), self.alpha, self.vt, self.v)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        y = g_group_act(self, other.as_fibre_point())
        rho, phi, zt, z = _unpack(y)
        return GroupElement(math.log(rho), phi, zt, z)


def _pack(rho, phi, zt, z):
    out = [rho, phi]
    for a, b in zip(zt, z):
        out.extend([a, b])
    return out


def _unpack(y):
    y = list(y)
    return y[0], y[1], y[2::2], y[3::2]


def _act(elem: GroupElement, y):
    """Ring program for the action on fibre coordinates (rho, phi, zt_0, z_0, ...)."""
    rho, phi, zt, z = _unpack(y)
    if len(zt) != elem.size:
        raise DomainError(f"element has {elem.size} zeta pairs, point has {len(zt)}")
    e = math.exp(elem.lam)
    h = math.exp(0.5 * elem.lam)
    twist = sum((float(a) * zi - float(b) * zti for a, b, zi, zti in zip(elem.vt, elem.v, z, zt)), 0.0)
    return _pack(
        e * rho,
        e * phi + elem.alpha + h * twist,
        [float(a) + h * zti for a, zti in zip(elem.vt, zt)],
        [float(b) + h * zi for b, zi in zip(elem.v, z)],
    )


def g_group_act(elem: GroupElement, fiber_point) -> np.ndarray:
    y = np.asarray(fiber_point, dtype=float)
    if y[0] <= 0.0:
        raise DomainError("rho must be positive")
    return np.array(_act(elem, list(y)), dtype=float)


def group_map(case: QkMetricCase, elem: GroupElement) -> ChartMap:
    """The group action on a full chart of ``case``, leaving the X-block fixed."""
    nb = case.x_block

    def fn(x):
        x = list(x)
        return x[:nb] + _act(elem, x[nb:])

    return ChartMap(case.dim, case.dim, fn, name="group action")


# -- infinitesimal generators ---------------------------------------------------------

def _fibre_field(case: QkMetricCase, fibre_fn, name: str) -> TensorFieldSpec:
    nb = case.x_block
    d = case.dim

    def fn(x):
        return [0.0] * nb + fibre_fn(list(x[nb:]))

    return make_field(d, "vector", fn, domain=case.metric.domain, name=name)


def heisenberg_generators(case: QkMetricCase) -> list[TensorFieldSpec]:
    """The 2k+3 generators d/d alpha, d/d vt_I, d/d v^I of the action at the identity."""
    npairs = (case.dim - case.x_block - 2) // 2
    out = [_fibre_field(case, lambda y: [0.0, 1.0] + [0.0] * (2 * npairs), "d_phi")]
    for I in range(npairs):
        def vt_dir(y, I=I):
            _, _, zt, z = _unpack(y)
            v = [0.0, z[I]] + [0.0] * (2 * npairs)
            v[2 + 2 * I] = 1.0
            return v

        def v_dir(y, I=I):
            _, _, zt, z = _unpack(y)
            v = [0.0, -zt[I]] + [0.0] * (2 * npairs)
            v[3 + 2 * I] = 1.0
            return v

        out.append(_fibre_field(case, vt_dir, f"d_vt{I}"))
        out.append(_fibre_field(case, v_dir, f"d_v{I}"))
    return out


def dilation_field(case: QkMetricCase) -> TensorFieldSpec:
    """D = rho d_rho + phi d_phi + (zt d_zt + z d_z)/2, the lambda-direction generator."""

    def fn(y):
        return [y[0], y[1]] + [0.5 * t for t in y[2:]]

    return _fibre_field(case, fn, "D")


def group_generator_by_jets(case: QkMetricCase, direction: int, p) -> np.ndarray:
    """Derivative of the action at the identity along one parameter, via jets.

    ``direction`` indexes (lam, alpha, vt_0, v_0, vt_1, v_1, ...).  Used as an
    independent check of the closed-form generators.
    """
    x = as_coords(p)
    nb = case.x_block
    npairs = (case.dim - nb - 2) // 2
    t = jm.Jet2(0.0, np.ones(1), np.zeros((1, 1)))
    params = [0.0] * (2 + 2 * npairs)
    params[direction] = t
    lam, alpha = params[0], params[1]
    vt, v = params[2::2], params[3::2]
    rho, phi, zt, z = _unpack(list(x[nb:]))
    e, h = jm.exp(lam), jm.exp(0.5 * lam)
    twist = sum((a * zi - b * zti for a, b, zi, zti in zip(vt, v, z, zt)), 0.0)
    img = _pack(e * rho, e * phi + alpha + h * twist, [a + h * q for a, q in zip(vt, zt)], [b + h * q for b, q in zip(v, z)])
    deriv = [c.g[0] if isinstance(c, jm.Jet2) else 0.0 for c in img]
    return np.array([0.0] * nb + deriv)


# -- universal hypermultiplet ------------------------------------------------------------

def uhm_killing_basis() -> list[TensorFieldSpec]:
    """X1 = d_phi, X2 = d_z - zt d_phi, X3 = d_zt + z d_phi, X4 = zt d_z - z d_zt."""
    dom = lambda x: x[0] > 0.0
    return [
        make_field(4, "vector", lambda x: [0.0, 1.0, 0.0, 0.0], domain=dom, name="X1"),
        make_field(4, "vector", lambda x: [0.0, -x[2], 0.0, 1.0], domain=dom, name="X2"),
        make_field(4, "vector", lambda x: [0.0, x[3], 1.0, 0.0], domain=dom, name="X3"),
        make_field(4, "vector", lambda x: [0.0, 0.0, -x[3], x[2]], domain=dom, name="X4"),
    ]


@dataclass(frozen=True)
class UhmIsometry:
    theta: float = 0.0
    u: tuple = (0.0, 0.0)
    kshift: float = 0.0
    branch: str = "direct"

    def __post_init__(self):
        if self.branch not in ("direct", "reflected"):
            raise ValueError("branch must be 'direct' or 'reflected'")
        object.__setattr__(self, "u", (float(self.u[0]), float(self.u[1])))


def uhm_isometry(iso: UhmIsometry) -> ChartMap:
    """Element of Heis_3 x| O(2) acting on (rho, phi, zt, z) with xi = zt + i z.

    direct:    xi -> e^{i theta}(xi + u),          phi -> phi - Im(u conj(xi)) + k
    reflected: xi -> e^{-i theta}(conj(xi + u)),   phi -> -(phi - Im(u conj(xi)) + k)
    """
    ct, st = math.cos(iso.theta), math.sin(iso.theta)
    a, b = iso.u
    k = float(iso.kshift)
    sign = 1.0 if iso.branch == "direct" else -1.0

    def fn(x):
        rho, phi, zt, z = x
        # xi + u, conjugated on the reflected branch
        re, im = zt + a, sign * (z + b)
        s = sign * st
        new_zt = ct * re - s * im
        new_z = s * re + ct * im
        im_u_xibar = b * zt - a * z
        new_phi = sign * (phi - im_u_xibar + k)
        return [rho, new_phi, new_zt, new_z]

    return ChartMap(4, 4, fn, name=f"uhm isometry ({iso.branch})")


# -- Killing residuals and rank probe ------------------------------------------------------

def killing_residuals(g: TensorFieldSpec, fields: Sequence[TensorFieldSpec], points) -> np.ndarray:
    """Sup-norm of L_X g per field, reusing the metric jets at each point."""
    worst = np.zeros(len(fields))
    for p in points:
        x = as_coords(p)
        gv, dg, _ = g.jets(x)
        for i, X in enumerate(fields):
            Xv, dX, _ = X.jets(x)
            r = calc._lie_value("sym2", 0, gv, dg, Xv, dX)
            worst[i] = max(worst[i], float(np.max(np.abs(r))))
    return worst


def killing_rank_probe(g: TensorFieldSpec, candidates: Sequence[TensorFieldSpec], points) -> int:
    """Dimension of the span of candidates that are Killing on all sample points."""
    m = len(candidates)
    if m == 0:
        return 0
    points = list(points)
    if len(points) < 2 * m:
        raise InsufficientSamples(f"need at least {2 * m} points for {m} candidates, got {len(points)}")
    gram = np.zeros((m, m))
    for p in points:
        x = as_coords(p)
        gv, dg, _ = g.jets(x)
        L = []
        for X in candidates:
            Xv, dX, _ = X.jets(x)
            L.append(calc._lie_value("sym2", 0, gv, dg, Xv, dX).ravel())
        L = np.array(L)
        gram += L @ L.T
    sv = np.linalg.svd(gram, compute_uv=False)
    # When every candidate is Killing the largest singular value is itself
    # round-off, so the scale is floored at one unit of residual per point.
    scale = max(float(sv[0]), float(len(points)))
    return int(np.sum(sv < KERNEL_RTOL * scale))
