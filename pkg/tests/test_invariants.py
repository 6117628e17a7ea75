import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkcmap import calculus as calc
from qkcmap.geometries import fs_higher, fs_uhm
from qkcmap.invariants import (
    UHM_MULTIPLICITIES,
    closed_form_norm,
    cluster_spectrum,
    curvature_report,
    factorization_check,
    injectivity_scan,
    strictly_monotone,
    uhm_eigen_formula,
)
from qkcmap.sampling import qk_points

from sympy_oracle import riemann_at, uhm_metric_symbolic


def test_riemann_matches_symbolic_oracle():
    X, g = uhm_metric_symbolic(1)
    p = [1.3, 0.4, -0.7, 0.9]
    g_num, R_sym = riemann_at(X, g, p)
    case = fs_uhm(1.0)
    cd = calc.curvature_data(case.metric, p)
    assert np.allclose(cd.g, g_num, atol=1e-13)
    # oracle entries are <R(d_c, d_d) d_b, d_a>, which is our R_abcd by pair symmetry
    assert np.allclose(cd.riemann, R_sym, atol=1e-10)
    assert cd.scal == pytest.approx(np.einsum("ac,bd,abcd->", np.linalg.inv(g_num), np.linalg.inv(g_num), R_sym), abs=1e-10)
    assert cd.scal == pytest.approx(-12.0, abs=1e-10)


def test_uhm_reference_spectra():
    rep = curvature_report(fs_uhm(0.0), fs_uhm(0.0).base_point(3.0))
    assert [m for _, m in rep.spectrum] == [1, 3, 2]
    assert np.allclose([lam for lam, _ in rep.spectrum], [-3, -1, 0], atol=1e-10)
    assert rep.norm_R2 == pytest.approx(12.0, abs=1e-10)
    assert rep.scal == pytest.approx(-12.0, abs=1e-10)
    rep = curvature_report(fs_uhm(1.0), fs_uhm(1.0).base_point(2.0))
    assert rep.norm_R2 == pytest.approx(6.09375, abs=1e-10)
    assert np.allclose(rep.eigenvalues, [-1.25, -1, -1, -1, -0.875, -0.875], atol=1e-10)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("c", [0.0, 0.25, 1.0])
def test_uhm_spectrum_formulas(rho, c):
    rep = curvature_report(fs_uhm(c), fs_uhm(c).base_point(rho))
    want = np.sort(np.repeat(uhm_eigen_formula(rho, c), UHM_MULTIPLICITIES))
    assert np.max(np.abs(rep.eigenvalues - want)) < 1e-7
    assert sum(m for _, m in rep.spectrum) == 6
    assert rep.norm_R2 == pytest.approx(sum(m * l**2 for l, m in rep.spectrum), rel=1e-9)


@pytest.mark.parametrize("family,k,cs", [("uhm", 0, [0.0, 0.5, 1.0]), ("higher", 1, [0.0, 0.5, 1.0])])
def test_einstein_and_constant_scalar_curvature(family, k, cs, rng):
    for c in cs:
        case = fs_uhm(c) if family == "uhm" else fs_higher(k, c)
        reps = [curvature_report(case, p) for p in qk_points(case, 15, rng)]
        assert max(r.einstein_residual for r in reps) < 1e-8
        scal = [r.scal for r in reps]
        assert max(scal) - min(scal) < 1e-8


def test_norm_is_point_independent_at_c0(rng):
    for case in (fs_uhm(0.0), fs_higher(1, 0.0)):
        vals = [curvature_report(case, p).norm_R2 for p in qk_points(case, 10, rng)]
        assert max(vals) - min(vals) < 1e-8


def test_norm_depends_only_on_rho(rng):
    for case in (fs_uhm(0.7), fs_higher(1, 0.5)):
        vals = [curvature_report(case, p).norm_R2 for p in qk_points(case, 10, rng, rho=1.9)]
        assert max(vals) - min(vals) < 1e-8


def test_closed_form_reference_values():
    assert closed_form_norm("uhm", 1, 2.0, 1.0) == pytest.approx(6.09375)
    assert closed_form_norm("higher", 1, 2.0, 1.0) == pytest.approx(6.09375)
    for rho in (0.3, 1.0, 7.0):
        assert closed_form_norm("higher", 2, rho, 0.0) == pytest.approx(40.0)
    with pytest.raises(ValueError):
        closed_form_norm("higher", 0, 1.0, 0.0)


@given(st.floats(0.01, 50), st.floats(0, 20))
def test_closed_form_reduction_at_n1(rho, c):
    assert closed_form_norm("higher", 1, rho, c) == pytest.approx(closed_form_norm("uhm", 1, rho, c), rel=1e-13)


@given(st.integers(1, 6), st.floats(0, 1), st.floats(0, 1))
def test_factorization_identity_and_positivity(n, x1, x2):
    res, qmin = factorization_check(n, [x1], [x2])
    assert res < 1e-10
    assert qmin >= 0 and (qmin > 0 or n == 1 or (x1 == 0 and x2 == 0))


def test_higher_norm_matches_closed_form():
    for c in (0.0, 0.5):
        case = fs_higher(1, c)
        for rho in (0.4, 1.1, 3.3):
            rep = curvature_report(case, case.base_point(rho))
            assert rep.norm_R2 == pytest.approx(closed_form_norm("higher", 2, rho, c), abs=1e-6)


def test_cluster_spectrum():
    assert cluster_spectrum([1.0, 1.0 + 1e-9, 2.0, -1.0]) == [(-1.0, 1), (pytest.approx(1.0), 2), (2.0, 1)]
    assert cluster_spectrum([]) == []


def test_monotone_flag():
    assert strictly_monotone([1, 2, 3])
    assert strictly_monotone([3, 2, 1])
    assert not strictly_monotone([1, 2, 2])
    assert not strictly_monotone([12.0, 12.0 + 1e-15, 12.0])


def test_injectivity_scans():
    grid = np.linspace(0.5, 5, 12)
    flat = injectivity_scan(fs_uhm(0.0), grid)
    assert not flat.strictly_monotone
    assert np.allclose(flat.norm_R2, 12.0, atol=1e-10)
    inc = injectivity_scan(fs_uhm(1.0), grid)
    assert inc.strictly_monotone and np.all(np.diff(inc.norm_R2) > 0)
    assert inc.eigenvalues.shape == (12, 3)
    hi = injectivity_scan(fs_higher(1, 0.5), grid)
    assert hi.max_deviation < 1e-6 and hi.strictly_monotone
    assert hi.factor_residual < 1e-12 and hi.factor_min > 0


def test_scan_rejects_bad_grids():
    with pytest.raises(ValueError):
        injectivity_scan(fs_uhm(1.0), np.linspace(1, 2, 5))
    with pytest.raises(ValueError):
        injectivity_scan(fs_uhm(1.0), np.linspace(2, 1, 12))
