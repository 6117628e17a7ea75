"""Invariant batteries behind ``qkcmap suite``.

Each suite returns a list of :class:`CheckRecord`.  Upper-bound checks pass
when ``max_residual <= tol``; lower-bound checks (a quantity that must stay
away from zero) carry ``bound="lower"`` and pass when ``max_residual > tol``.
Geometry errors raised inside a check turn that check into a failure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import calculus as calc
from .errors import GeometryError
from .geometries import cask_domain, elementary_deformation, fs_higher, fs_uhm, rigid_cmap
from .hkqk import (
    _lift_residuals,
    automorphism_residuals,
    canonical_lift,
    cocycle,
    modified_field,
    psk_projection_check,
    su_generators,
    twist_killing_residuals,
)
from .invariants import closed_form_norm, curvature_report, quaternionic_dim, uhm_eigen_formula, UHM_MULTIPLICITIES
from .parallel import point_map
from .sampling import cask_points, hk_points, level_set_points, qk_points
from .symmetry import (
    UhmIsometry,
    dilation_field,
    heisenberg_generators,
    killing_rank_probe,
    killing_residuals,
    uhm_isometry,
    uhm_killing_basis,
)

CASES = ("uhm", "higher", "cask", "rigid", "hkqk-pipeline")
# fixed thresholds for the "must not vanish" checks
NONKILLING_BOUND = 1e-3
UNTWISTED_BOUND = 1e-4


@dataclass
class CheckRecord:
    name: str
    max_residual: float
    tol: float
    passed: bool
    bound: str = "upper"
    error: str = ""

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if not d["error"]:
            d.pop("error")
        return d


class _Battery:
    def __init__(self, tol: float):
        self.tol = tol
        self.records: list[CheckRecord] = []

    def upper(self, name: str, fn: Callable[[], float], tol: float | None = None) -> None:
        self._run(name, fn, self.tol if tol is None else tol, "upper")

    def lower(self, name: str, fn: Callable[[], float], bound: float) -> None:
        self._run(name, fn, bound, "lower")

    def _run(self, name, fn, tol, bound):
        try:
            val = float(fn())
        except GeometryError as exc:
            self.records.append(CheckRecord(name, math.inf if bound == "upper" else 0.0, tol, False, bound, f"{type(exc).__name__}: {exc}"))
            return
        ok = (val <= tol) if bound == "upper" else (val > tol)
        ok = ok and math.isfinite(val)
        self.records.append(CheckRecord(name, val, tol, bool(ok), bound))


def _sup(arrs) -> float:
    return float(max((np.max(np.abs(a)) for a in arrs), default=0.0))


# -- quaternionic Kahler cases ------------------------------------------------

def _curvature_checks(b: _Battery, case, pts) -> None:
    reps = point_map(lambda p: curvature_report(case, p), pts)
    n = quaternionic_dim(case)
    b.upper("norm_R2 vs closed form", lambda: max(abs(r.norm_R2 - closed_form_norm(case.family, n, r.point.coords[case.rho_index], case.c)) for r in reps))
    b.upper("einstein residual", lambda: max(r.einstein_residual for r in reps))
    scal = np.array([r.scal for r in reps])
    b.upper("scal spread", lambda: float(scal.max() - scal.min()))
    if case.family == "uhm":
        def spectrum():
            worst = 0.0
            for r in reps:
                rho = r.point.coords[0]
                want = np.repeat(uhm_eigen_formula(rho, case.c), UHM_MULTIPLICITIES)
                worst = max(worst, float(np.max(np.abs(np.sort(want) - r.eigenvalues))))
            return worst
        b.upper("spectrum vs eigenvalue formulas", spectrum)


def _level_set_check(b: _Battery, case, rng) -> None:
    pts = qk_points(case, 10, rng, rho=1.7)
    vals = point_map(lambda p: curvature_report(case, p).norm_R2, pts)
    b.upper("norm_R2 spread on rho level set", lambda: max(vals) - min(vals))


def suite_uhm(c: float, samples: int, rng: np.random.Generator, tol: float) -> list[CheckRecord]:
    b = _Battery(tol)
    case = fs_uhm(c)
    pts = qk_points(case, samples, rng)
    _curvature_checks(b, case, pts)
    _level_set_check(b, case, rng)
    X = uhm_killing_basis()
    D = dilation_field(case)
    res = killing_residuals(case.metric, X + [D], pts)
    b.upper("Killing X1..X4", lambda: float(res[:4].max()))
    if c == 0:
        b.upper("dilation D Killing (c = 0)", lambda: float(res[4]))
    else:
        b.lower("dilation D not Killing (c > 0)", lambda: float(res[4]), NONKILLING_BOUND)
    for branch in ("direct", "reflected"):
        def pull(branch=branch):
            worst = 0.0
            for _ in range(5):
                th, ua, ub, ks = rng.uniform(-math.pi, math.pi), *rng.uniform(-1, 1, 2), rng.uniform(-3, 3)
                phi = uhm_isometry(UhmIsometry(th, (ua, ub), ks, branch))
                worst = max(worst, _sup(calc.pullback_check(phi, case.metric, p) for p in pts))
            return worst
        b.upper(f"isometry pullback ({branch})", pull)
    expected = 5 if c == 0 else 4
    b.upper(f"killing_rank_probe == {expected}", lambda: abs(killing_rank_probe(case.metric, X + [D], pts[: max(10, samples)]) - expected), 0.5)
    return b.records


def suite_higher(k: int, c: float, samples: int, rng: np.random.Generator, tol: float) -> list[CheckRecord]:
    b = _Battery(tol)
    case = fs_higher(k, c)
    pts = qk_points(case, samples, rng)
    b.lower("metric positive definite (min eigenvalue)", lambda: min(float(np.linalg.eigvalsh(case.metric.values(p)).min()) for p in pts), 0.0)
    _curvature_checks(b, case, pts)
    if c > 0:
        _level_set_check(b, case, rng)
    H = heisenberg_generators(case)
    D = dilation_field(case)
    res = killing_residuals(case.metric, H + [D], pts)
    b.upper(f"Killing Heisenberg generators ({len(H)})", lambda: float(res[:-1].max()))
    if c == 0:
        b.upper("dilation D Killing (c = 0)", lambda: float(res[-1]))
    else:
        b.lower("dilation D not Killing (c > 0)", lambda: float(res[-1]), NONKILLING_BOUND)
    return b.records


# -- flat and hyper-Kahler cases --------------------------------------------------

def suite_cask(k: int, samples: int, rng: np.random.Generator, tol: float) -> list[CheckRecord]:
    b = _Battery(tol)
    cask = cask_domain(k)
    pts = cask_points(cask, samples, rng)

    def herm():
        worst = 0.0
        for q in pts:
            u, v = rng.normal(size=(2, cask.dim))
            om = cask.omega_M.values(q)
            gM = cask.g_M.values(q)
            J = cask.J.values(q)
            worst = max(worst, abs(u @ om @ v - (J @ u) @ gM @ v))
        return worst

    b.upper("omega_M = g_M(J., .)", herm)
    b.upper("Jacobian of xi is the identity", lambda: _sup(cask.xi.jets(q)[1] - np.eye(cask.dim) for q in pts))
    u, su = su_generators(k)
    b.upper("u(k,1) generators preserve g_M, omega_M, J", lambda: max(max(automorphism_residuals(A, cask).values()) for A in u))
    if k >= 1:
        lv = level_set_points(cask, samples, rng)

        def psk(key):
            return max(psk_projection_check(A, cask, q)[key] for A in su for q in lv)

        b.upper("PSK projection: g_M(X_A, xi)", lambda: psk("orthogonal"))
        b.upper("PSK projection: [X_A, J xi]", lambda: psk("commutes"))
        b.upper("PSK projection: horizontal Hamiltonian", lambda: psk("hamiltonian"))
    return b.records


def _rigid_checks(b: _Battery, hk, pts) -> None:
    I1, I2, I3 = hk.Imats
    eye = np.eye(hk.dim)
    b.upper("quaternion relations", lambda: _sup([I1 @ I1 + eye, I2 @ I2 + eye, I3 @ I3 + eye, I1 @ I2 - I3]))
    b.upper("omega_a = g(I_a., .)", lambda: _sup([hk.omats[a + 1] - hk.Imats[a].T @ hk.gmat for a in range(3)]))
    b.upper("d omega_a", lambda: _sup(calc.exterior_derivative(w, p) for w in (hk.om1, hk.om2, hk.om3) for p in pts))
    b.upper("Nijenhuis I1, I2", lambda: _sup(calc.nijenhuis(I, p) for I in (hk.I1, hk.I2) for p in pts))
    b.upper("d f_Z + i_Z omega_1", lambda: _sup(hk.f_Z.jets(p)[1] + calc.contract_vector(hk.omats[1], hk.Z.values(p)) for p in pts))
    b.upper("L_Z g, L_Z omega_1", lambda: _sup(calc.lie_derivative(T, hk.Z, p) for T in (hk.g, hk.om1) for p in pts))
    b.upper("L_Z omega_2 - omega_3", lambda: _sup(calc.lie_derivative(hk.om2, hk.Z, p) - hk.om3.values(p) for p in pts))
    b.upper("L_Z omega_3 + omega_2", lambda: _sup(calc.lie_derivative(hk.om3, hk.Z, p) + hk.om2.values(p) for p in pts))


def suite_rigid(k: int, c: float, samples: int, rng: np.random.Generator, tol: float) -> list[CheckRecord]:
    b = _Battery(tol)
    hk = rigid_cmap(cask_domain(k), c)
    pts = hk_points(hk, samples, rng)
    _rigid_checks(b, hk, pts)
    dd = elementary_deformation(hk)
    b.upper("d omega_H", lambda: _sup(calc.exterior_derivative(dd.om_H, p) for p in pts))
    return b.records


def suite_pipeline(k: int, c: float, samples: int, rng: np.random.Generator, tol: float) -> list[CheckRecord]:
    b = _Battery(tol)
    hk = rigid_cmap(cask_domain(k), c)
    dd = elementary_deformation(hk)
    pts = hk_points(hk, samples, rng)
    u, _ = su_generators(k)
    cands = [canonical_lift(A, hk) for A in u]

    def lifts():
        return max(max(_lift_residuals(cd, hk, pts[:10]).values()) for cd in cands)

    b.upper("lift invariants (Killing, triholomorphic, Hamiltonian)", lifts)
    YH = [modified_field(cd, hk, dd) for cd in cands]
    b.upper("twist-Killing residual of Y_H", lambda: float(twist_killing_residuals(YH, hk, dd, pts).max()))
    if len(cands) > 1:
        # the central generator iI lifts to a multiple of Z, which already satisfies the criterion
        b.lower(
            "twist-Killing residual with psi = 0 (non-central)",
            lambda: float(twist_killing_residuals([cd.Y for cd in cands[1:]], hk, dd, pts).min()),
            UNTWISTED_BOUND,
        )
    b.lower(
        "Z is not triholomorphic (L_Z omega_2)",
        lambda: _sup([calc.lie_derivative(hk.om2, hk.Z, pts[0])]),
        UNTWISTED_BOUND,
    )
    rep_box: dict = {}

    def coc():
        rep_box["r"] = cocycle(cands, hk, pts, deformed=dd, spread_tol=math.inf)
        return rep_box["r"].max_spread

    b.upper("cocycle constancy (spread)", coc)
    b.upper("bracket closure", lambda: rep_box["r"].closure_residual if "r" in rep_box else math.inf)
    return b.records


def run_checks(case: str, k: int, c: float, samples: int, seed: int, tol: float) -> list[CheckRecord]:
    rng = np.random.default_rng(seed)
    if case == "uhm":
        return suite_uhm(c, samples, rng, tol)
    if case == "higher":
        return suite_higher(k, c, samples, rng, tol)
    if case == "cask":
        return suite_cask(k, samples, rng, tol)
    if case == "rigid":
        return suite_rigid(k, c, samples, rng, tol)
    if case == "hkqk-pipeline":
        return suite_pipeline(k, c, samples, rng, tol)
    raise ValueError(f"unknown case {case!r}")
