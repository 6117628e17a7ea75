"""Explicit geometries in real coordinates.

Complex coordinates are realified as ``z = x + i y`` pairs ``(x, y)``, the
complex structure acts by ``J d_x = d_y``, ``|dz|^2 = dx^2 + dy^2`` and
``(i/2) dz ^ dzbar = dx ^ dy``.

Coordinate orders
-----------------
* CASK domain ``M_k``: ``(x0, y0, x1, y1, ..., xk, yk)``.
* Rigid c-map ``T*M_k``: base coordinates ``q`` followed by fibre
  coordinates ``p`` in the same order.
* Quaternionic Kahler cases: ``(X-block, rho, phi, zt_0, z_0, ..., zt_k, z_k)``
  where ``zt_I`` is the tilde-zeta and ``z_I`` the zeta coordinate.  The
  universal hypermultiplet is the case with an empty X-block:
  ``(rho, phi, zt, z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import jets as jm
from .errors import DomainError, TwistSingularity
from .fields import TensorFieldSpec, linear_vector_field, make_field, register_chart


# -- helpers -----------------------------------------------------------------

def realify(A) -> np.ndarray:
    """Real 2n x 2n matrix of a complex n x n matrix on (x0, y0, x1, y1, ...)."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    R = np.zeros((2 * n, 2 * n))
    R[0::2, 0::2] = A.real
    R[0::2, 1::2] = -A.imag
    R[1::2, 0::2] = A.imag
    R[1::2, 1::2] = A.real
    return R


def hermitian_form(k: int) -> np.ndarray:
    """eta = diag(-1, 1, ..., 1) of signature (k, 1)."""
    return np.diag([-1.0] + [1.0] * k)


class _SymBuilder:
    """Accumulates a symmetric (0,2)-tensor from squares of sparse one-forms."""

    def __init__(self, d: int):
        self.d = d
        self.m: list[list[Any]] = [[0.0] * d for _ in range(d)]

    def add(self, i: int, j: int, val) -> None:
        self.m[i][j] = self.m[i][j] + val
        if i != j:
            self.m[j][i] = self.m[j][i] + val

    def add_square(self, coef, form: dict[int, Any]) -> None:
        items = list(form.items())
        for a, (i, ai) in enumerate(items):
            cai = coef * ai
            self.m[i][i] = self.m[i][i] + cai * ai
            for j, aj in items[a + 1:]:
                self.add(i, j, cai * aj)

    def add_matrix(self, coef, offset: int, block) -> None:
        n = len(block)
        for i in range(n):
            for j in range(n):
                b = block[i][j]
                if isinstance(b, float) and b == 0.0:
                    continue
                self.m[offset + i][offset + j] = self.m[offset + i][offset + j] + coef * b


# -- CASK domains --------------------------------------------------------------

@dataclass(frozen=True)
class CaskStructure:
    k: int
    dim: int
    g_M: TensorFieldSpec
    omega_M: TensorFieldSpec
    J: TensorFieldSpec
    xi: TensorFieldSpec
    gmat: np.ndarray
    Jmat: np.ndarray
    omat: np.ndarray
    flat_chart: bool = True

    def norm_xi(self, q) -> float:
        """g_M(xi, xi) = sum |z_j|^2 - |z_0|^2 (negative on the domain)."""
        q = np.asarray(q, dtype=float)
        return float(q @ self.gmat @ q)

    def in_domain(self, q) -> bool:
        return self.norm_xi(q) < 0.0


def cask_domain(k: int) -> CaskStructure:
    """Flat CASK domain M_k = {|z0|^2 > sum_{j>=1} |z_j|^2} in C^{k+1}."""
    if k < 0:
        raise ValueError("k must be >= 0")
    d = 2 * k + 2
    chart = f"M{k}"
    register_chart(chart, d)
    gmat = realify(hermitian_form(k))
    Jmat = realify(1j * np.eye(k + 1))
    omat = Jmat.T @ gmat

    def domain(x):
        return float(x @ gmat @ x) < 0.0

    gm, Jm, om = gmat.copy(), Jmat.copy(), omat.copy()
    return CaskStructure(
        k=k,
        dim=d,
        g_M=make_field(d, "sym2", lambda x: gm, domain=domain, name="g_M"),
        omega_M=make_field(d, "form", lambda x: om, degree=2, domain=domain, name="omega_M"),
        J=make_field(d, "endo", lambda x: Jm, domain=domain, name="J"),
        xi=make_field(d, "vector", lambda x: list(x), domain=domain, name="xi"),
        gmat=gmat,
        Jmat=Jmat,
        omat=omat,
    )


def complex_hyperbolic(k: int) -> TensorFieldSpec:
    """Complex hyperbolic metric on the unit ball in C^k, coordinates (x1, y1, ...)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d = 2 * k

    def domain(x):
        return float(x @ x) < 1.0

    def fn(x):
        u = 1.0 - sum(xi * xi for xi in x)
        iu = 1.0 / u
        b = _SymBuilder(d)
        for i in range(d):
            b.m[i][i] = iu
        re = {i: x[i] for i in range(d)}
        im = {}
        for j in range(k):
            xj, yj = x[2 * j], x[2 * j + 1]
            im[2 * j] = -yj
            im[2 * j + 1] = xj
        iu2 = iu * iu
        b.add_square(iu2, re)
        b.add_square(iu2, im)
        return b.m

    return make_field(d, "sym2", fn, domain=domain, name=f"g_CH{k}")


def kahler_potential_ch(k: int) -> TensorFieldSpec:
    """K = -log(1 - |X|^2) for the complex hyperbolic ball."""
    d = 2 * k
    return make_field(
        d,
        "scalar",
        lambda x: -jm.log(1.0 - sum(xi * xi for xi in x)),
        domain=lambda x: float(x @ x) < 1.0,
        name="K",
    )


# -- quaternionic Kahler metrics -------------------------------------------------

@dataclass(frozen=True)
class QkMetricCase:
    family: str
    k: int
    c: float
    metric: TensorFieldSpec

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def x_block(self) -> int:
        """Number of base (X) coordinates preceding rho."""
        return 0 if self.family == "uhm" else 2 * self.k

    @property
    def rho_index(self) -> int:
        return self.x_block

    def base_point(self, rho: float) -> np.ndarray:
        x = np.zeros(self.dim)
        x[self.rho_index] = rho
        return x


def fs_uhm(c: float) -> QkMetricCase:
    """One-loop deformed Ferrara-Sabharwal metric on the universal hypermultiplet.

    Coordinates ``(rho, phi, zt, z)``::

        g = 1/(2 rho^2) [ (rho+2c)/(rho+c) drho^2
                          + (rho+c)/(rho+2c) (dphi + z dzt - zt dz)^2
                          + 2 (rho+2c) (dzt^2 + dz^2) ]
    """
    if c < 0:
        raise ValueError("c must be >= 0")
    c = float(c)
    register_chart("uhm", 4)

    def domain(x):
        return x[0] > 0.0

    def fn(x):
        rho, _, zt, z = x
        pre = 1.0 / (2.0 * rho * rho)
        a = rho + c
        b = rho + 2.0 * c
        m = _SymBuilder(4)
        m.m[0][0] = pre * b / a
        m.add_square(pre * a / b, {1: 1.0, 2: z, 3: -zt})
        flat = pre * 2.0 * b
        m.m[2][2] = m.m[2][2] + flat
        m.m[3][3] = m.m[3][3] + flat
        return m.m

    return QkMetricCase("uhm", 0, c, make_field(4, "sym2", fn, domain=domain, name=f"g_uhm(c={c})"))


def fs_higher(k: int, c: float, *, printed: bool = False) -> QkMetricCase:
    """One-loop deformed Ferrara-Sabharwal metric over complex hyperbolic k-space.

    The coordinate expression is the standard one::

        (rho+c)/rho g_CH + 1/(4 rho^2) (rho+2c)/(rho+c) drho^2
        + 1/(4 rho^2) (rho+c)/(rho+2c) (dphi + sum_I (z^I dzt_I - zt_I dz^I)
                                          + 2c/(1-|X|^2) Im sum_j Xbar_j dX_j)^2
        + 1/(2 rho) (sum_j (dzt_j^2 + dz_j^2) - dzt_0^2 - dz_0^2)
        + (rho+c)/rho^2 /(1-|X|^2) |dzt_0 + i dz_0 + sum_j X_j (dzt_j - i dz_j)|^2

    That expression is half of the metric with reduced scalar curvature -1
    (at k = 0 it is exactly ``fs_uhm(c) / 2``).  By default it is doubled so
    that the family shares the normalization of :func:`fs_uhm`;
    ``printed=True`` returns it undoubled.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if c < 0:
        raise ValueError("c must be >= 0")
    c = float(c)
    nx = 2 * k
    d = 4 * k + 4
    register_chart(f"higher{k}", d)
    ir, iphi = nx, nx + 1

    def zt(I):
        return nx + 2 + 2 * I

    def z(I):
        return nx + 3 + 2 * I

    def domain(x):
        return x[ir] > 0.0 and float(x[:nx] @ x[:nx]) < 1.0

    def fn(x):
        X = x[:nx]
        rho = x[ir]
        u = 1.0 - sum(xi * xi for xi in X)
        iu = 1.0 / u
        a = rho + c
        b = rho + 2.0 * c
        m = _SymBuilder(d)
        if k:
            # (rho+c)/rho * g_CH
            s = a / rho
            for i in range(nx):
                m.m[i][i] = s * iu
            re = {i: X[i] for i in range(nx)}
            im = {}
            for j in range(k):
                im[2 * j] = -X[2 * j + 1]
                im[2 * j + 1] = X[2 * j]
            m.add_square(s * iu * iu, re)
            m.add_square(s * iu * iu, im)
        q = 1.0 / (4.0 * rho * rho)
        m.m[ir][ir] = q * b / a
        theta = {iphi: 1.0}
        for I in range(k + 1):
            theta[zt(I)] = x[z(I)]
            theta[z(I)] = -x[zt(I)]
        if k and c != 0.0:
            w = 2.0 * c * iu
            for j in range(k):
                theta[2 * j] = -w * X[2 * j + 1]
                theta[2 * j + 1] = w * X[2 * j]
        m.add_square(q * a / b, theta)
        h = 1.0 / (2.0 * rho)
        for I in range(k + 1):
            sgn = -h if I == 0 else h
            m.m[zt(I)][zt(I)] = m.m[zt(I)][zt(I)] + sgn
            m.m[z(I)][z(I)] = m.m[z(I)][z(I)] + sgn
        # (rho+c)/rho^2 /(1-|X|^2) |dzt_0 + i dz_0 + sum X^j (dzt_j - i dz_j)|^2
        re_w = {zt(0): 1.0}
        im_w = {z(0): 1.0}
        for j in range(1, k + 1):
            xj, yj = X[2 * (j - 1)], X[2 * (j - 1) + 1]
            re_w[zt(j)] = xj
            re_w[z(j)] = yj
            im_w[zt(j)] = yj
            im_w[z(j)] = -xj
        coef = a / (rho * rho) * iu
        m.add_square(coef, re_w)
        m.add_square(coef, im_w)
        if scale != 1.0:
            return [[scale * e for e in row] for row in m.m]
        return m.m

    scale = 1.0 if printed else 2.0
    return QkMetricCase("higher", k, c, make_field(d, "sym2", fn, domain=domain, name=f"g_N{k}(c={c})"))


# -- rigid c-map -----------------------------------------------------------------

TWIST_FLOOR = 1e-12


def _nonzero(f, label: str):
    if abs(jm.value_of(f)) < TWIST_FLOOR:
        raise TwistSingularity(f"{label} vanishes at this point")
    return f


def _bilinear(M: np.ndarray, u, v):
    """u^T M v over any ring, skipping structural zeros of M."""
    acc = 0.0
    rows, cols = np.nonzero(M)
    for i, j in zip(rows, cols):
        acc = acc + (float(M[i, j]) * u[i]) * v[j]
    return acc


def _matvec(M: np.ndarray, x):
    out = []
    for row in M:
        nz = np.nonzero(row)[0]
        out.append(sum((float(row[j]) * x[j] for j in nz), 0.0))
    return out


@dataclass(frozen=True)
class HKData:
    """Rigid c-map hyper-Kahler structure on T*M in flat canonical coordinates (q, p).

    All tensors are constant in this chart; ``Z`` and the one-forms
    ``alpha_i = omega_i(Z, .)`` are linear, which the matrix attributes expose.
    """

    base: CaskStructure
    dim: int
    c: float
    g: TensorFieldSpec
    I1: TensorFieldSpec
    I2: TensorFieldSpec
    I3: TensorFieldSpec
    om1: TensorFieldSpec
    om2: TensorFieldSpec
    om3: TensorFieldSpec
    Z: TensorFieldSpec
    f_Z: TensorFieldSpec
    gmat: np.ndarray
    Imats: tuple
    omats: tuple  # (g, omega_1, omega_2, omega_3) as matrices
    Zmat: np.ndarray  # Z(x) = Zmat @ x

    def in_domain(self, x) -> bool:
        n = self.base.dim
        return self.base.in_domain(np.asarray(x, dtype=float)[:n])

    def f_Z_value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        q = x[: self.base.dim]
        return float(-0.5 * q @ self.base.gmat @ q - 0.5 * self.c)


def rigid_cmap(cask: CaskStructure, c: float = 0.0) -> HKData:
    """Hyper-Kahler structure on N = T*M with rotating symmetry Z and f_Z shifted by -c/2.

    With respect to the flat splitting TN = TM + T*M::

        g  = diag(g_M, g_M^-1)          I1 = diag(J, J^T)
        I2 = [[0, -W^-1], [W, 0]]       I3 = I1 I2

    where ``W = omega_M^T`` is the matrix of ``v -> omega_M(v, .)`` and ``J^T``
    is the induced action on fibre coordinates.  ``Z = -(J xi)~`` is the
    horizontal lift, ``f_Z = -g_M(xi, xi)/2 - c/2``.
    """
    n = cask.dim
    d = 2 * n
    register_chart(f"TM{cask.k}", d)
    G, J, Om = cask.gmat, cask.Jmat, cask.omat
    Z0 = np.zeros((n, n))
    gmat = np.block([[G, Z0], [Z0, np.linalg.inv(G)]])
    W = Om.T
    I1 = np.block([[J, Z0], [Z0, J.T]])
    I2 = np.block([[Z0, -np.linalg.inv(W)], [W, Z0]])
    I3 = I1 @ I2
    omats = (gmat, I1.T @ gmat, I2.T @ gmat, I3.T @ gmat)
    Zmat = np.block([[-J, Z0], [Z0, Z0]])
    c = float(c)

    def domain(x):
        q = x[:n]
        return float(q @ G @ q) < 0.0

    def const(M, valence, name, degree=0):
        M = M.copy()
        return make_field(d, valence, lambda x: M, degree=degree, domain=domain, name=name)

    def f_Z(x):
        q = x[:n]
        return -0.5 * _bilinear(G, q, q) - 0.5 * c

    return HKData(
        base=cask,
        dim=d,
        c=c,
        g=const(gmat, "sym2", "g"),
        I1=const(I1, "endo", "I1"),
        I2=const(I2, "endo", "I2"),
        I3=const(I3, "endo", "I3"),
        om1=const(omats[1], "form", "omega1", 2),
        om2=const(omats[2], "form", "omega2", 2),
        om3=const(omats[3], "form", "omega3", 2),
        Z=make_field(d, "vector", lambda x: _matvec(Zmat, x), domain=domain, name="Z"),
        f_Z=make_field(d, "scalar", f_Z, domain=domain, name="f_Z"),
        gmat=gmat,
        Imats=(I1, I2, I3),
        omats=omats,
        Zmat=Zmat,
    )


@dataclass(frozen=True)
class DeformedData:
    """Elementary deformation g_H and twist data (omega_H, f_H) with B = k = 1."""

    g_H: TensorFieldSpec
    om_H: TensorFieldSpec
    f_H: TensorFieldSpec
    alphas: tuple  # alpha_i = omega_i(Z, .) as linear covector fields
    alpha_mats: tuple
    om_H_mat: np.ndarray

    def __iter__(self):
        return iter((self.g_H, self.om_H, self.f_H))


def elementary_deformation(hk: HKData) -> DeformedData:
    """g_H = g/f_Z + g_alpha/f_Z^2, omega_H = omega_1 + d alpha_0, f_H = f_Z + g(Z, Z)."""
    d = hk.dim
    domain = hk.g.domain
    # alpha_i(x)_j = (omega_i)_{aj} Z^a = (omega_i^T Zmat x)_j
    alpha_mats = tuple(om.T @ hk.Zmat for om in hk.omats)
    alphas = tuple(
        make_field(d, "covector", (lambda M: lambda x: _matvec(M, x))(M.copy()), domain=domain, name=f"alpha{i}")
        for i, M in enumerate(alpha_mats)
    )
    # alpha_0 is linear in the flat chart, so d alpha_0 is the constant A^T - A
    A0 = alpha_mats[0]
    om_H_mat = hk.omats[1] + (A0.T - A0)
    gmat = hk.gmat
    ZgZ = hk.Zmat.T @ gmat @ hk.Zmat
    f_Z_prog = hk.f_Z.eval
    nz_g = list(zip(*np.nonzero(gmat)))

    def f_H(x):
        return _nonzero(f_Z_prog(x) + _bilinear(ZgZ, x, x), "f_H")

    def g_H(x):
        fz = _nonzero(f_Z_prog(x), "f_Z")
        inv = 1.0 / fz
        inv2 = inv * inv
        b = _SymBuilder(d)
        for i, j in nz_g:
            b.m[i][j] = float(gmat[i, j]) * inv
        for M in alpha_mats:
            a = _matvec(M, x)
            b.add_square(inv2, {j: a[j] for j in range(d) if np.any(M[j])})
        return b.m

    Hm = om_H_mat.copy()
    return DeformedData(
        g_H=make_field(d, "sym2", g_H, domain=domain, name="g_H"),
        om_H=make_field(d, "form", lambda x: Hm, degree=2, domain=domain, name="omega_H"),
        f_H=make_field(d, "scalar", f_H, domain=domain, name="f_H"),
        alphas=alphas,
        alpha_mats=alpha_mats,
        om_H_mat=om_H_mat,
    )
