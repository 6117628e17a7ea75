"""Curvature invariants of the quaternionic Kahler cases and their closed forms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import calculus as calc
from .fields import Point, as_coords
from .geometries import QkMetricCase

CLUSTER_TOL = 1e-7
MONOTONE_TOL = 1e-12


@dataclass(frozen=True)
class CurvatureReport:
    point: Point
    spectrum: list  # [(eigenvalue, multiplicity)], ascending
    norm_R2: float
    scal: float
    einstein_residual: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([[lam] * mu for lam, mu in self.spectrum]) if self.spectrum else np.zeros(0)


def cluster_spectrum(eigs: Sequence[float], tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues whose consecutive gaps are below ``tol``."""
    eigs = np.sort(np.asarray(eigs, dtype=float))
    out: list[tuple[float, int]] = []
    group: list[float] = []
    for lam in eigs:
        if group and lam - group[-1] > tol:
            out.append((float(np.mean(group)), len(group)))
            group = []
        group.append(float(lam))
    if group:
        out.append((float(np.mean(group)), len(group)))
    return out


def curvature_report(case: QkMetricCase, p, tol: float = CLUSTER_TOL) -> CurvatureReport:
    x = as_coords(p)
    cd = calc.curvature_data(case.metric, x)
    op = calc.operator_from(cd)
    dim = case.dim
    ein = float(np.max(np.abs(cd.ricci - cd.scal / dim * cd.g)))
    eigs = op.eigenvalues
    return CurvatureReport(
        point=Point(case.family if case.family == "uhm" else f"qk{case.k}", x),
        spectrum=cluster_spectrum(eigs, tol),
        norm_R2=float(np.sum(eigs**2)),
        scal=cd.scal,
        einstein_residual=ein,
    )


def _ratio(rho: float, c: float) -> float:
    return rho / (rho + 2.0 * c)


def closed_form_norm(family: str, n: int, rho: float, c: float) -> float:
    """Closed-form squared norm of the curvature operator.

    ``uhm``: ``6 (1 + r^6)``; ``higher``:
    ``n(5n+1) + 3((n-1) r + r^3)^2 + 3((n-1) r^2 + r^6)`` with ``r = rho/(rho+2c)``.
    """
    if rho <= 0 or c < 0 or n < 1:
        raise ValueError("need rho > 0, c >= 0, n >= 1")
    r = _ratio(rho, c)
    if family == "uhm":
        return 6.0 * (1.0 + r**6)
    if family == "higher":
        return n * (5 * n + 1) + 3.0 * ((n - 1) * r + r**3) ** 2 + 3.0 * ((n - 1) * r**2 + r**6)
    raise ValueError(f"unknown family {family!r}")


def uhm_eigen_formula(rho: float, c: float) -> np.ndarray:
    """The three curvature-operator eigenvalues of the deformed universal hypermultiplet."""
    t = _ratio(rho, c) ** 3
    return np.array([-(1.0 + 2.0 * t), -1.0, -(1.0 - t)])


UHM_MULTIPLICITIES = (1, 3, 2)


def quaternionic_dim(case: QkMetricCase) -> int:
    return case.dim // 4


def psi_profile(n: int, x):
    """The r-dependent part of the higher-family norm, a polynomial in x = r."""
    x = np.asarray(x, dtype=float)
    return 3.0 * ((x**3 + (n - 1) * x) ** 2 + x**6 + (n - 1) * x**2)


def factorization_check(n: int, x1, x2) -> tuple[float, float]:
    """Residual of the difference factorization and the minimum of its positive factor.

    ``(psi(x1) - psi(x2))/3 = (x1 - x2)(x1 + x2) q(x1, x2)`` with
    ``q = 2(x1^4 + x2^4) + 2 x1^2 x2^2 + 2(x1^2 + x2^2)(n-1) + n(n-1)``.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    q = 2 * (x1**4 + x2**4) + 2 * x1**2 * x2**2 + 2 * (x1**2 + x2**2) * (n - 1) + n * (n - 1)
    lhs = (psi_profile(n, x1) - psi_profile(n, x2)) / 3.0
    rhs = (x1 - x2) * (x1 + x2) * q
    return float(np.max(np.abs(lhs - rhs), initial=0.0)), float(np.min(q, initial=np.inf))


@dataclass(frozen=True)
class SweepReport:
    family: str
    k: int
    c: float
    rho: np.ndarray
    norm_R2: np.ndarray
    reference: np.ndarray
    max_deviation: float
    strictly_monotone: bool
    scal: np.ndarray
    eigenvalues: Optional[np.ndarray] = None  # (len(rho), 3) for uhm
    factor_residual: float = 0.0
    factor_min: float = float("inf")


def strictly_monotone(values: Sequence[float], tol: float = MONOTONE_TOL) -> bool:
    """All consecutive differences exceed ``tol`` in absolute value and share one sign."""
    d = np.diff(np.asarray(values, dtype=float))
    if d.size == 0:
        return False
    return bool(np.all(d > tol) or np.all(d < -tol))


def injectivity_scan(case: QkMetricCase, rho_grid, base=None, *, mapper=map) -> SweepReport:
    """Curvature norm along a rho-line, compared with the closed form."""
    grid = np.asarray(rho_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 10:
        raise ValueError("rho grid needs at least 10 points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("rho grid must be strictly increasing")
    if np.any(grid <= 0):
        raise ValueError("rho grid must be positive")
    base = np.zeros(case.dim) if base is None else np.asarray(base, dtype=float).copy()
    i = case.rho_index

    def point(rho):
        x = base.copy()
        x[i] = rho
        return x

    reports = list(mapper(lambda r: curvature_report(case, point(r)), grid))
    norms = np.array([r.norm_R2 for r in reports])
    n = quaternionic_dim(case)
    ref = np.array([closed_form_norm(case.family, n, r, case.c) for r in grid])
    eig = None
    if case.family == "uhm":
        eig = np.array([[lam for lam, _ in r.spectrum] + [np.nan] * (3 - len(r.spectrum)) for r in reports])[:, :3]
    ratios = grid / (grid + 2 * case.c)
    fres, fmin = factorization_check(n, ratios[1:], ratios[:-1])
    return SweepReport(
        family=case.family,
        k=case.k,
        c=case.c,
        rho=grid,
        norm_R2=norms,
        reference=ref,
        max_deviation=float(np.max(np.abs(norms - ref))),
        strictly_monotone=strictly_monotone(norms),
        scal=np.array([r.scal for r in reports]),
        eigenvalues=eig,
        factor_residual=fres,
        factor_min=fmin,
    )
