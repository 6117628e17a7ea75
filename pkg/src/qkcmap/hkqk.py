"""Lifting CASK automorphisms through the HK/QK correspondence.

Everything is checked on the hyper-Kahler manifold ``N = T*M`` itself: a
field ``V`` descends to a Killing field of the twisted quaternionic Kahler
metric iff ``L_V g_H - 2 f_H^-1 (i_V omega_H) v (i_Z g_H) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import calculus as calc
from . import jets as jm
from .errors import ClosureError, DomainError, TwistSingularity, ValidationError
from .fields import TensorFieldSpec, as_coords, make_field
from .geometries import (
    CaskStructure,
    DeformedData,
    HKData,
    TWIST_FLOOR,
    _bilinear,
    _matvec,
    hermitian_form,
    realify,
)

LIFT_TOL = 1e-10
CLOSURE_TOL = 1e-9
COCYCLE_SPREAD_TOL = 1e-8


# -- u(k,1) ---------------------------------------------------------------------

def su_generators(k: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Bases of u(k,1) and su(k,1) as complex (k+1)x(k+1) matrices.

    The u basis is ``[iI] + su basis``.  Every ``A`` satisfies
    ``A^H eta + eta A = 0`` with ``eta = diag(-1, 1, ..., 1)``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    n = k + 1
    eta = hermitian_form(k)

    def E(a, b):
        m = np.zeros((n, n), dtype=complex)
        m[a, b] = 1.0
        return m

    su: list[np.ndarray] = []
    for j in range(1, n):
        su.append(1j * (E(j, j) - E(0, 0)))
    for j in range(1, n):
        for l in range(j + 1, n):
            su.append(E(j, l) - E(l, j))
            su.append(1j * (E(j, l) + E(l, j)))
    for j in range(1, n):
        # eta-antihermitian mixing of the timelike direction with z_j
        su.append(E(0, j) + E(j, 0))
        su.append(1j * (E(0, j) - E(j, 0)))
    for A in su:
        assert np.allclose(A.conj().T @ eta + eta @ A, 0.0)
    return [1j * np.eye(n, dtype=complex)] + su, su


def _real_generator(A, cask: CaskStructure) -> np.ndarray:
    A = np.asarray(A)
    if np.iscomplexobj(A) or A.shape[0] == cask.k + 1:
        A = realify(A)
    A = np.asarray(A, dtype=float)
    if A.shape != (cask.dim, cask.dim):
        raise ValidationError(f"generator has shape {A.shape}, expected {(cask.dim, cask.dim)}")
    return A


def automorphism_residuals(A, cask: CaskStructure) -> dict[str, float]:
    """Residuals of L_{X_A} g_M, L_{X_A} omega_M and [X_A, xi] for X_A(q) = A q."""
    R = _real_generator(A, cask)
    G, Om = cask.gmat, cask.omat
    return {
        "g_M": float(np.max(np.abs(R.T @ G + G @ R), initial=0.0)),
        "omega_M": float(np.max(np.abs(R.T @ Om + Om @ R), initial=0.0)),
        "J": float(np.max(np.abs(R @ cask.Jmat - cask.Jmat @ R), initial=0.0)),
        # [X_A, xi] = A q - A q vanishes identically for linear X_A
        "xi": 0.0,
    }


# -- canonical lifts ------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryCandidate:
    Y: TensorFieldSpec
    f_omega1: TensorFieldSpec
    f_omegaH: TensorFieldSpec
    origin: np.ndarray
    Ymat: np.ndarray = field(repr=False, default=None)
    shift: float = 0.0


def lift_matrix(A: np.ndarray) -> np.ndarray:
    """Flat-chart matrix of Y = X~ - (nabla X)*(eta) for X(q) = A q: (A q, -A^T p)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    Z0 = np.zeros((n, n))
    return np.block([[A, Z0], [Z0, -A.T]])


def canonical_lift_field(A) -> TensorFieldSpec:
    """The lifted vector field on T*R^n, without Hamiltonian data."""
    M = lift_matrix(A)
    return make_field(M.shape[0], "vector", lambda x: _matvec(M, x), name="Y")


def cask_moment_matrix(A, cask: CaskStructure) -> np.ndarray:
    """Symmetric S with f_X(q) = q^T S q, where f_X = alpha(X), alpha = d^c f / 2, f = g(xi, xi)/2.

    In this form ``f_X = g_M(J xi, X) / 2`` and ``d f_X = -i_X omega_M``.
    """
    R = _real_generator(A, cask)
    S = 0.5 * (cask.Jmat.T @ cask.gmat @ R)
    return 0.5 * (S + S.T)


def fibre_moment_matrix(A, cask: CaskStructure) -> np.ndarray:
    """S^{jk} = (omega_M^-1)^{ij} dX^k/dq^i as a symmetric matrix on fibre coordinates."""
    R = _real_generator(A, cask)
    S = np.linalg.inv(cask.omat).T @ R.T
    asym = np.max(np.abs(S - S.T), initial=0.0)
    if asym > 1e-12:
        raise ValidationError(f"fibre moment matrix is not symmetric ({asym:.2e})")
    return 0.5 * (S + S.T)


def _lift_residuals(cand: SymmetryCandidate, hk: HKData, points) -> dict[str, float]:
    worst: dict[str, float] = {}

    def bump(key, val):
        worst[key] = max(worst.get(key, 0.0), float(np.max(np.abs(val), initial=0.0)))

    for x in points:
        _, df, _ = cand.f_omega1.jets(x)
        Yv = cand.Y.values(x)
        bump("hamiltonian_omega1", df + calc.contract_vector(hk.omats[1], Yv))
        for name, T in (("g", hk.g), ("omega1", hk.om1), ("omega2", hk.om2), ("omega3", hk.om3), ("f_Z", hk.f_Z)):
            bump(f"L_Y {name}", calc.lie_derivative(T, cand.Y, x))
        bump("[Y,Z]", calc.lie_bracket(cand.Y, hk.Z, x))
    return worst


def _probe_points(hk: HKData, count: int = 3) -> list[np.ndarray]:
    rng = np.random.default_rng(12345)
    from .sampling import hk_points

    return hk_points(hk, count, rng)


def canonical_lift(A, hk: HKData, *, validate: bool = True) -> SymmetryCandidate:
    """Lift a CASK automorphism to a triholomorphic, f_Z-preserving Killing field.

    ``f_omega1 = pi* f_X + S(eta, eta) / 2`` where the factor one half turns the
    double sum over index pairs into the quadratic form matching ``omega_1``'s
    fibre block.
    """
    cask = hk.base
    R = _real_generator(A, cask)
    res = automorphism_residuals(R, cask)
    if max(res.values()) > LIFT_TOL:
        raise ValidationError(f"not a CASK automorphism: {res}")
    n = cask.dim
    Ymat = lift_matrix(R)
    SX = cask_moment_matrix(R, cask)
    Sf = fibre_moment_matrix(R, cask)
    # one quadratic form on (q, p)
    Q1 = np.zeros((2 * n, 2 * n))
    Q1[:n, :n] = SX
    Q1[n:, n:] = 0.5 * Sf
    ZgY = hk.Zmat.T @ hk.gmat @ Ymat
    QH = Q1 + 0.5 * (ZgY + ZgY.T)
    domain = hk.g.domain

    cand = SymmetryCandidate(
        Y=make_field(2 * n, "vector", lambda x: _matvec(Ymat, x), domain=domain, name="Y"),
        f_omega1=make_field(2 * n, "scalar", lambda x: _bilinear(Q1, x, x), domain=domain, name="f_omega1"),
        f_omegaH=make_field(2 * n, "scalar", lambda x: _bilinear(QH, x, x), domain=domain, name="f_omegaH"),
        origin=R,
        Ymat=Ymat,
    )
    if validate:
        worst = _lift_residuals(cand, hk, _probe_points(hk))
        bad = {k: v for k, v in worst.items() if v > LIFT_TOL}
        if bad:
            raise ValidationError(f"lifted field fails invariants: {bad}")
    return cand


def shift_hamiltonian(cand: SymmetryCandidate, C: float) -> SymmetryCandidate:
    """Same field, with f_omegaH replaced by f_omegaH + C."""
    base = cand.f_omegaH.eval
    C = float(C)
    f = make_field(cand.f_omegaH.dim, "scalar", lambda x: base(x) + C, domain=cand.f_omegaH.domain, name="f_omegaH")
    return SymmetryCandidate(cand.Y, cand.f_omega1, f, cand.origin, cand.Ymat, cand.shift + C)


def combine_candidates(cands: Sequence[SymmetryCandidate], coeffs: Sequence[float]) -> SymmetryCandidate:
    """Linear combination with additively chosen Hamiltonians."""
    from .fields import combine

    return SymmetryCandidate(
        Y=combine([c.Y for c in cands], coeffs, name="Y"),
        f_omega1=combine([c.f_omega1 for c in cands], coeffs, name="f_omega1"),
        f_omegaH=combine([c.f_omegaH for c in cands], coeffs, name="f_omegaH"),
        origin=sum(a * c.origin for a, c in zip(coeffs, cands)),
        Ymat=sum(a * c.Ymat for a, c in zip(coeffs, cands)),
        shift=sum(a * c.shift for a, c in zip(coeffs, cands)),
    )


# -- twist ------------------------------------------------------------------------

def modified_field(cand: SymmetryCandidate, hk: HKData, deformed: Optional[DeformedData] = None) -> TensorFieldSpec:
    """Y_H = Y - (f_omegaH / f_H) Z."""
    from .geometries import elementary_deformation

    deformed = deformed or elementary_deformation(hk)
    fY, fH, Y, Z = cand.f_omegaH.eval, deformed.f_H.eval, cand.Y.eval, hk.Z.eval

    def fn(x):
        h = fH(x)
        if abs(jm.value_of(h)) < TWIST_FLOOR:
            raise TwistSingularity("f_H vanishes at this point")
        psi = fY(x) / h
        return [y - psi * z for y, z in zip(Y(x), Z(x))]

    return make_field(hk.dim, "vector", fn, domain=hk.g.domain, name="Y_H")


def _twist_from(gH, dgH, Vv, dV, omH, fH, Zv):
    lie = calc._lie_value("sym2", 0, gH, dgH, Vv, dV)
    a = calc.contract_vector(omH, Vv)
    b = calc.contract_vector(gH, Zv)
    return lie - (2.0 / fH) * calc.sym_product(a, b)


def twist_killing_residual(V: TensorFieldSpec, hk: HKData, deformed: DeformedData, p) -> np.ndarray:
    """L_V g_H - 2 f_H^-1 (i_V omega_H) v (i_Z g_H) at p."""
    x = as_coords(p)
    gH, dgH, _ = deformed.g_H.jets(x)
    Vv, dV, _ = V.jets(x)
    fH = float(deformed.f_H.values(x))
    return _twist_from(gH, dgH, Vv, dV, deformed.om_H.values(x), fH, hk.Z.values(x))


def twist_killing_residuals(fields: Sequence[TensorFieldSpec], hk: HKData, deformed: DeformedData, points) -> np.ndarray:
    """Sup-norm of the twist residual per field, reusing the g_H jets at each point."""
    worst = np.zeros(len(fields))
    omH = deformed.om_H_mat
    for p in points:
        x = as_coords(p)
        gH, dgH, _ = deformed.g_H.jets(x)
        fH = float(deformed.f_H.values(x))
        Zv = hk.Z.values(x)
        for i, V in enumerate(fields):
            Vv, dV, _ = V.jets(x)
            r = _twist_from(gH, dgH, Vv, dV, omH, fH, Zv)
            worst[i] = max(worst[i], float(np.max(np.abs(r))))
    return worst


# -- central extension ----------------------------------------------------------

@dataclass(frozen=True)
class CocycleReport:
    A: np.ndarray  # mean of omega_H(Y_j, Y_k) - sum_l c^l_jk f_{Y_l}
    spread: np.ndarray  # max - min over the sample points, per entry
    structure_constants: np.ndarray  # [l, j, k]
    closure_residual: float

    @property
    def max_spread(self) -> float:
        return float(np.max(self.spread, initial=0.0))


def structure_constants(cands: Sequence[SymmetryCandidate], points) -> tuple[np.ndarray, float]:
    """Least-squares c^l_jk with [Y_j, Y_k] = sum_l c^l_jk Y_l, plus the closure residual."""
    m = len(cands)
    pts = [as_coords(p) for p in points]
    if m == 0:
        return np.zeros((0, 0, 0)), 0.0
    basis = np.concatenate([np.stack([c.Y.values(x) for c in cands], axis=1) for x in pts], axis=0)
    C = np.zeros((m, m, m))
    worst = 0.0
    for j in range(m):
        for k in range(j + 1, m):
            br = np.concatenate([calc.lie_bracket(cands[j].Y, cands[k].Y, x) for x in pts])
            coef, *_ = np.linalg.lstsq(basis, br, rcond=None)
            worst = max(worst, float(np.max(np.abs(basis @ coef - br), initial=0.0)))
            C[:, j, k] = coef
            C[:, k, j] = -coef
    return C, worst


def cocycle(
    cands: Sequence[SymmetryCandidate],
    hk: HKData,
    points,
    structure: Optional[np.ndarray] = None,
    *,
    deformed: Optional[DeformedData] = None,
    spread_tol: float = COCYCLE_SPREAD_TOL,
) -> CocycleReport:
    """The central-extension matrix A_jk evaluated on the untwisted side."""
    from .geometries import elementary_deformation

    m = len(cands)
    pts = [as_coords(p) for p in points]
    if m < 2:
        return CocycleReport(np.zeros((m, m)), np.zeros((m, m)), np.zeros((m, m, m)), 0.0)
    deformed = deformed or elementary_deformation(hk)
    fitted, closure = structure_constants(cands, pts[:3])
    C = fitted if structure is None else np.asarray(structure, dtype=float)
    # closure is asserted on every sample point, not only where c was fitted
    for x in pts:
        Yv = np.stack([c.Y.values(x) for c in cands], axis=1)
        for j in range(m):
            for k in range(j + 1, m):
                r = calc.lie_bracket(cands[j].Y, cands[k].Y, x) - Yv @ C[:, j, k]
                closure = max(closure, float(np.max(np.abs(r))))
    if closure > CLOSURE_TOL:
        raise ClosureError(f"candidates do not close: residual {closure:.3e}")
    omH = deformed.om_H_mat
    vals = np.zeros((len(pts), m, m))
    for t, x in enumerate(pts):
        Yv = [c.Y.values(x) for c in cands]
        fv = np.array([float(c.f_omegaH.values(x)) for c in cands])
        for j in range(m):
            for k in range(j + 1, m):
                a = Yv[j] @ omH @ Yv[k] - C[:, j, k] @ fv
                vals[t, j, k] = a
                vals[t, k, j] = -a
    A = vals.mean(axis=0)
    A = 0.5 * (A - A.T)  # exact antisymmetry after averaging
    spread = vals.max(axis=0) - vals.min(axis=0)
    rep = CocycleReport(A, spread, C, closure)
    if rep.max_spread > spread_tol:
        raise ValidationError(f"cocycle not constant: spread {rep.max_spread:.3e}")
    return rep


# -- projection to the PSK base ----------------------------------------------------

def psk_projection_check(A, cask: CaskStructure, p, *, level_tol: float = 1e-9) -> dict[str, float]:
    """Residuals of the horizontal/vertical splitting of X_A on the level set g(xi, xi) = -1.

    ``(c)`` compares ``dh`` with ``-dtheta(X^H, .)`` on horizontal vectors,
    where ``h = -f`` is minus the ``J xi`` coefficient and ``theta = g_M(J xi, .)``
    is the connection one-form whose curvature is the pulled-back Kahler form.
    """
    q = as_coords(p)
    if q.shape[0] != cask.dim:
        raise DomainError(f"expected {cask.dim} coordinates")
    G, J = cask.gmat, cask.Jmat
    if abs(q @ G @ q + 1.0) > level_tol:
        raise DomainError("point is not on the level set g(xi, xi) = -1")
    R = _real_generator(A, cask)
    X = R @ q
    Jq = J @ q
    a = abs(float(X @ G @ q))
    b = max(float(np.max(np.abs(R @ q - R @ q))), float(np.max(np.abs(R @ Jq - J @ (R @ q)))))

    RT = R.copy()

    def coeff(x):
        Xx = _matvec(RT, x)
        Jx = _matvec(J, x)
        return _bilinear(G, Xx, Jx) / _bilinear(G, Jx, Jx)

    fspec = make_field(cask.dim, "scalar", coeff, name="f")
    f, df, _ = fspec.jets(q)
    XH = X - f * Jq
    theta = make_field(cask.dim, "covector", lambda x: _matvec(G @ J, x), name="theta")
    dtheta = calc.exterior_derivative(theta, q)
    gqq = float(q @ G @ q)
    worst = 0.0
    for e in np.eye(cask.dim):
        v = e - (e @ G @ q) / gqq * q - (e @ G @ Jq) / gqq * Jq
        dh = -float(df @ v)
        worst = max(worst, abs(dh + float(XH @ dtheta @ v)))
    return {"orthogonal": a, "commutes": b, "hamiltonian": worst, "f": float(f), "XH_norm": float(np.max(np.abs(XH)))}
