import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkcmap import calculus as calc
from qkcmap.errors import DomainError, InsufficientSamples
from qkcmap.fields import combine
from qkcmap.geometries import fs_higher, fs_uhm
from qkcmap.sampling import qk_points
from qkcmap.symmetry import (
    GroupElement,
    UhmIsometry,
    dilation_field,
    g_group_act,
    group_generator_by_jets,
    group_map,
    heisenberg_generators,
    killing_rank_probe,
    killing_residuals,
    uhm_isometry,
    uhm_killing_basis,
)

unit = st.floats(-1, 1, allow_nan=False)


def _element(draw_vals, k):
    lam, alpha, *rest = draw_vals
    return GroupElement(lam, alpha, rest[: k + 1], rest[k + 1 : 2 * k + 2])


elements = st.lists(unit, min_size=6, max_size=6).map(lambda v: _element(v, 1))


# -- the group ------------------------------------------------------------------------------

def test_identity_fixes_points():
    y = np.array([1.3, 0.2, -0.5, 0.7, 0.1, 0.9])
    assert np.array_equal(g_group_act(GroupElement.identity(1), y), y)


def test_pure_alpha_shifts_phi_only():
    y = np.array([1.3, 0.2, -0.5, 0.7])
    out = g_group_act(GroupElement(0.0, 0.8, [0.0], [0.0]), y)
    assert np.allclose(out, y + [0, 0.8, 0, 0])


@given(elements, elements, elements)
def test_action_is_compatible_with_product_and_associative(a, b, c):
    y = np.array([0.9, 0.3, -0.4, 0.2, 0.6, -0.1])
    assert np.allclose(g_group_act(a * b, y), g_group_act(a, g_group_act(b, y)), atol=1e-12)
    lhs, rhs = (a * b) * c, a * (b * c)
    assert np.allclose(lhs.as_fibre_point(), rhs.as_fibre_point(), atol=1e-10)


def test_action_domain_and_shape_errors():
    with pytest.raises(DomainError):
        g_group_act(GroupElement.identity(0), [0.0, 0, 0, 0])
    with pytest.raises(DomainError):
        g_group_act(GroupElement.identity(1), [1.0, 0, 0, 0])


@pytest.mark.parametrize("k", [1, 2])
def test_group_acts_isometrically(k, rng):
    for c in (0.0, 0.5):
        case = fs_higher(k, c)
        for _ in range(3):
            lam = rng.uniform(-0.5, 0.5) if c == 0 else 0.0
            elem = GroupElement(lam, rng.uniform(-1, 1), rng.uniform(-1, 1, k + 1), rng.uniform(-1, 1, k + 1))
            phi = group_map(case, elem)
            for p in qk_points(case, 5, rng):
                assert np.max(np.abs(calc.pullback_check(phi, case.metric, p))) < 1e-10


def test_dilation_is_not_an_isometry_for_c_positive(rng):
    case = fs_higher(1, 0.5)
    phi = group_map(case, GroupElement(0.3, 0.0, [0, 0], [0, 0]))
    p = qk_points(case, 1, rng)[0]
    assert np.max(np.abs(calc.pullback_check(phi, case.metric, p))) > 1e-3


# -- generators --------------------------------------------------------------------------------

@pytest.mark.parametrize("k", [0, 1, 2])
def test_generators_are_derivatives_of_the_action(k, rng):
    case = fs_uhm(0.3) if k == 0 else fs_higher(k, 0.3)
    fields = [dilation_field(case)] + heisenberg_generators(case)
    assert len(fields) == 2 * k + 4
    for p in qk_points(case, 3, rng):
        for direction, X in enumerate(fields):
            assert np.allclose(group_generator_by_jets(case, direction, p), X.values(p), atol=1e-14)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("c", [0.0, 0.5])
def test_heisenberg_generators_are_killing(k, c, rng):
    case = fs_higher(k, c)
    H = heisenberg_generators(case)
    res = killing_residuals(case.metric, H + [dilation_field(case)], qk_points(case, 20, rng))
    assert res[:-1].max() < 1e-9
    assert (res[-1] < 1e-9) if c == 0 else (res[-1] > 1e-3)


# -- universal hypermultiplet ----------------------------------------------------------------------

@pytest.mark.parametrize("c", [0.0, 0.3, 1.0])
def test_uhm_killing_basis(c, rng):
    case = fs_uhm(c)
    assert killing_residuals(case.metric, uhm_killing_basis(), qk_points(case, 50, rng)).max() < 1e-9


def test_uhm_bracket_table(rng):
    X1, X2, X3, X4 = uhm_killing_basis()
    for p in qk_points(fs_uhm(1.0), 5, rng):
        br = lambda a, b: calc.lie_bracket(a, b, p)
        assert np.allclose(br(X2, X3), 2 * X1.values(p))
        assert np.allclose(br(X4, X2), X3.values(p))
        assert np.allclose(br(X4, X3), -X2.values(p))
        for X in (X2, X3, X4):
            assert np.allclose(br(X1, X), 0.0)


def test_rotation_is_a_combination_of_heisenberg_fields(rng):
    X1, X2, X3, X4 = uhm_killing_basis()
    for p in qk_points(fs_uhm(1.0), 5, rng):
        _, _, zt, z = p
        combo = (zt**2 + z**2) * X1.values(p) + zt * X2.values(p) - z * X3.values(p)
        assert np.allclose(combo, X4.values(p))


def test_identity_isometry():
    phi = uhm_isometry(UhmIsometry())
    p = np.array([1.2, 0.3, -0.4, 0.8])
    assert np.allclose(phi.values(p), p)
    assert np.max(np.abs(calc.pullback_check(phi, fs_uhm(1.0).metric, p))) == 0.0


@pytest.mark.parametrize(
    "iso",
    [
        UhmIsometry(theta=math.pi / 2),
        UhmIsometry(theta=0.0, u=(0.3, 0.4), kshift=2.0, branch="reflected"),
        UhmIsometry(theta=1.1, u=(-0.5, 0.2), kshift=-0.7, branch="direct"),
    ],
)
def test_isometries_pull_back_the_metric(iso, rng):
    case = fs_uhm(1.0)
    phi = uhm_isometry(iso)
    for p in qk_points(case, 50, rng):
        assert np.max(np.abs(calc.pullback_check(phi, case.metric, p))) < 1e-10
        assert phi.values(p)[0] == p[0]


def test_isometry_branch_validation():
    with pytest.raises(ValueError):
        UhmIsometry(branch="twisted")


# -- rank probe ----------------------------------------------------------------------------------

def test_rank_probe_counts(rng):
    assert killing_rank_probe(fs_uhm(1.0).metric, [], []) == 0
    for c, want in ((1.0, 4), (0.0, 5)):
        case = fs_uhm(c)
        cands = uhm_killing_basis() + [dilation_field(case)]
        assert killing_rank_probe(case.metric, cands, qk_points(case, 12, rng)) == want


def test_rank_probe_needs_enough_points(rng):
    case = fs_uhm(1.0)
    with pytest.raises(InsufficientSamples):
        killing_rank_probe(case.metric, uhm_killing_basis(), qk_points(case, 7, rng))


def test_rank_probe_invariant_under_recombination(rng):
    case = fs_uhm(0.6)
    base = uhm_killing_basis() + [dilation_field(case)]
    M = rng.normal(size=(5, 5)) + 3 * np.eye(5)
    mixed = [combine(base, list(row)) for row in M]
    pts = qk_points(case, 12, rng)
    assert killing_rank_probe(case.metric, mixed, pts) == killing_rank_probe(case.metric, base, pts) == 4


def test_fibre_symmetry_count_on_higher_family(rng):
    case = fs_higher(1, 0.5)
    cands = heisenberg_generators(case) + [dilation_field(case)]
    assert killing_rank_probe(case.metric, cands, qk_points(case, 12, rng)) == 5
