"""Chart-level tensor calculus on top of jet evaluation.

Curvature sign convention: ``R_abcd = k (g_ac g_bd - g_ad g_bc)`` for a
metric of constant sectional curvature ``k``, so the round sphere has
``R_1212 = +1`` and ``Ric_bd = g^ac R_abcd`` is positive on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import DomainError, EigenFailure, SingularMetric
from .fields import ChartMap, TensorFieldSpec, as_coords

DET_FLOOR = 1e-14


@dataclass(frozen=True)
class CurvatureData:
    """Everything derived from the second jet of a metric at one point."""

    g: np.ndarray
    ginv: np.ndarray
    christoffel: np.ndarray  # [k, i, j] = Gamma^k_ij
    riemann: np.ndarray  # [a, b, c, d] = R_abcd
    ricci: np.ndarray
    scal: float


@dataclass(frozen=True)
class CurvatureOperator:
    matrix: np.ndarray  # R_(ij)(kl) on the basis d_i ^ d_j, i < j
    gram: np.ndarray  # induced inner product on 2-vectors
    eigenvalues: np.ndarray  # ascending, generalized problem matrix v = lam gram v
    pairs: tuple


def _require_metric(g: TensorFieldSpec) -> None:
    if g.valence != "sym2":
        raise TypeError(f"expected a sym2 field, got valence {g.valence!r}")


def _inverse(gv: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(gv)):
        raise DomainError("metric is not finite at this point")
    det = np.linalg.det(gv)
    if abs(det) < DET_FLOOR:
        raise SingularMetric(f"det(g) = {det:.3e}")
    return np.linalg.inv(gv)


def _christoffel_from(ginv, dg):
    # dg[i, j, k] = d_k g_ij ; first kind Gamma_{l, ij}
    first = 0.5 * (
        np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    )
    return np.einsum("kl,lij->kij", ginv, first)


def christoffel(g: TensorFieldSpec, p) -> np.ndarray:
    """Gamma^k_ij of the Levi-Civita connection, shape (d, d, d)."""
    _require_metric(g)
    gv, dg, _ = g.jets(p)
    return _christoffel_from(_inverse(gv), dg)


def curvature_data(g: TensorFieldSpec, p) -> CurvatureData:
    _require_metric(g)
    gv, dg, ddg = g.jets(p)
    ginv = _inverse(gv)
    gam = _christoffel_from(ginv, dg)
    # ddg[i, j, k, l] = d_k d_l g_ij
    second = 0.5 * (
        np.einsum("adbc->abcd", ddg)
        + np.einsum("bcad->abcd", ddg)
        - np.einsum("bdac->abcd", ddg)
        - np.einsum("acbd->abcd", ddg)
    )
    quad = np.einsum("ef,ebc,fad->abcd", gv, gam, gam) - np.einsum("ef,ebd,fac->abcd", gv, gam, gam)
    riem = second + quad
    ric = np.einsum("ac,abcd->bd", ginv, riem)
    scal = float(np.einsum("bd,bd->", ginv, ric))
    return CurvatureData(gv, ginv, gam, riem, ric, scal)


def riemann(g: TensorFieldSpec, p) -> np.ndarray:
    return curvature_data(g, p).riemann


def ricci_scalar(g: TensorFieldSpec, p) -> tuple[np.ndarray, float]:
    cd = curvature_data(g, p)
    return cd.ricci, cd.scal


def bianchi_residuals(R: np.ndarray) -> dict[str, float]:
    """Sup-norms of the algebraic Riemann symmetries."""
    return {
        "antisym_ab": float(np.max(np.abs(R + np.swapaxes(R, 0, 1)))),
        "antisym_cd": float(np.max(np.abs(R + np.swapaxes(R, 2, 3)))),
        "pair_sym": float(np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1))))),
        "first_bianchi": float(
            np.max(np.abs(R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))))
        ),
    }


def operator_from(cd: CurvatureData) -> CurvatureOperator:
    d = cd.g.shape[0]
    pairs = tuple(combinations(range(d), 2))
    idx_i = np.array([a for a, _ in pairs])
    idx_j = np.array([b for _, b in pairs])
    mat = cd.riemann[idx_i[:, None], idx_j[:, None], idx_i[None, :], idx_j[None, :]]
    gv = cd.g
    gram = (
        gv[idx_i[:, None], idx_i[None, :]] * gv[idx_j[:, None], idx_j[None, :]]
        - gv[idx_i[:, None], idx_j[None, :]] * gv[idx_j[:, None], idx_i[None, :]]
    )
    mat = 0.5 * (mat + mat.T)
    try:
        try:
            eig = scipy.linalg.eigh(mat, gram, eigvals_only=True)
        except np.linalg.LinAlgError:
            # indefinite gram (pseudo-Riemannian input)
            w = scipy.linalg.eigvals(mat, gram)
            if np.max(np.abs(w.imag)) > 1e-8 * max(1.0, np.max(np.abs(w.real))):
                raise EigenFailure("complex curvature-operator spectrum")
            eig = np.sort(w.real)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(str(exc)) from exc
    return CurvatureOperator(mat, gram, np.sort(eig), pairs)


def curvature_operator(g: TensorFieldSpec, p) -> CurvatureOperator:
    return operator_from(curvature_data(g, p))


# -- Lie derivatives ---------------------------------------------------------

_COVARIANT_SLOTS = {"scalar": 0, "covector": 1, "sym2": 2}


def _lie_value(valence, degree, Tv, dT, Xv, dX):
    """L_X T from the first jets; dT[..., k] = d_k T, dX[i, k] = d_k X^i.

    Bilinear in (T, dT) and (X, dX), which the gradient version exploits.
    """
    out = dT @ Xv
    if valence == "vector":
        return out - dX @ Tv
    if valence == "endo":
        return out - dX @ Tv + Tv @ dX
    nslots = degree if valence == "form" else _COVARIANT_SLOTS[valence]
    for s in range(nslots):
        term = np.tensordot(Tv, dX, axes=([s], [0]))
        out = out + np.moveaxis(term, -1, s)
    return out


def lie_derivative(T: TensorFieldSpec, X: TensorFieldSpec, p) -> np.ndarray:
    if X.valence != "vector":
        raise TypeError("X must be a vector field")
    x = as_coords(p)
    Tv, dT, _ = T.jets(x)
    Xv, dX, _ = X.jets(x)
    return _lie_value(T.valence, T.degree, Tv, dT, Xv, dX)


def lie_derivative_jet(T: TensorFieldSpec, X: TensorFieldSpec, p) -> tuple[np.ndarray, np.ndarray]:
    """L_X T at p together with its coordinate gradient (last axis)."""
    x = as_coords(p)
    Tv, dT, ddT = T.jets(x)
    Xv, dX, ddX = X.jets(x)
    val = _lie_value(T.valence, T.degree, Tv, dT, Xv, dX)
    grad = np.stack(
        [
            _lie_value(T.valence, T.degree, dT[..., m], ddT[..., m], Xv, dX)
            + _lie_value(T.valence, T.degree, Tv, dT, dX[:, m], ddX[:, :, m])
            for m in range(x.shape[0])
        ],
        axis=-1,
    )
    return val, grad


def lie_bracket(X: TensorFieldSpec, Y: TensorFieldSpec, p) -> np.ndarray:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    if X.dim != Y.dim:
        raise DomainError("vector fields live on different charts")
    x = as_coords(p)
    Xv, dX, _ = X.jets(x)
    Yv, dY, _ = Y.jets(x)
    return dY @ Xv - dX @ Yv


# -- exterior calculus ------------------------------------------------------

def _form_degree(w: TensorFieldSpec) -> int:
    if w.valence == "form":
        return w.degree
    if w.valence == "covector":
        return 1
    if w.valence == "scalar":
        return 0
    raise TypeError(f"not a differential form: valence {w.valence!r}")


def _d_from_grad(dT: np.ndarray, p: int) -> np.ndarray:
    E = np.moveaxis(dT, -1, 0)
    out = np.zeros(E.shape)
    for s in range(p + 1):
        out = out + (-1) ** s * np.moveaxis(E, 0, s)
    return out


def exterior_derivative(w: TensorFieldSpec, p) -> np.ndarray:
    """(dw)_{i0..ip} = sum_s (-1)^s d_{i_s} w_{i0..^i_s..ip}."""
    deg = _form_degree(w)
    _, dT, _ = w.jets(p)
    return _d_from_grad(dT, deg)


def exterior_derivative_jet(w: TensorFieldSpec, p) -> tuple[np.ndarray, np.ndarray]:
    deg = _form_degree(w)
    _, dT, ddT = w.jets(p)
    val = _d_from_grad(dT, deg)
    grad = np.stack([_d_from_grad(ddT[..., m], deg) for m in range(dT.shape[-1])], axis=-1)
    return val, grad


def d_of_jet(grad: np.ndarray, p: int) -> np.ndarray:
    """Exterior derivative of a p-form given only its gradient array."""
    return _d_from_grad(grad, p)


# -- misc operators ----------------------------------------------------------

def pullback_check(phi: ChartMap, g: TensorFieldSpec, p) -> np.ndarray:
    """Residual (phi^* g)(p) - g(p) as a symmetric matrix."""
    _require_metric(g)
    x = as_coords(p)
    if phi.dim_in != g.dim or phi.dim_out != g.dim:
        raise DomainError("map and metric live on charts of different dimension")
    y, D = phi.jacobian(x)
    gy = g.values(y)
    return D.T @ gy @ D - g.values(x)


def nijenhuis(I: TensorFieldSpec, p) -> np.ndarray:
    """N^k_ij of an endomorphism field (vanishes iff I is integrable)."""
    if I.valence != "endo":
        raise TypeError("Nijenhuis tensor needs an endomorphism field")
    Iv, dI, _ = I.jets(p)
    # dI[k, j, l] = d_l I^k_j
    t1 = np.einsum("li,kjl->kij", Iv, dI)
    t2 = np.einsum("lj,kil->kij", Iv, dI)
    t3 = np.einsum("kl,lji->kij", Iv, dI) - np.einsum("kl,lij->kij", Iv, dI)
    return t1 - t2 - t3


def contract_vector(w: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Interior product i_X on the first slot."""
    return np.tensordot(X, w, axes=([0], [0]))


def sym_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a v b = (a (x) b + b (x) a) / 2."""
    ab = np.outer(a, b)
    return 0.5 * (ab + ab.T)
