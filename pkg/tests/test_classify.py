import numpy as np
import pytest

from morseig.classify.classification import (
    Borderline,
    Classification,
    NonDegenerateCritical,
    NotCovered,
    Regular,
    SmoothCritical,
)
from morseig.classify.classify_point import classify_point
from morseig.classify.conditions import (
    NFailure,
    NFails,
    NHolds,
    NotCertified,
    RegularCertified,
    check_condition_N,
    check_regular,
    check_transversality,
    clarke_bound,
)
from morseig.classify.definiteness import Found, NotFound, definite_in_span, sphere_sampling_margin
from morseig.config.morseig_env import DEFAULT_OPTIONS
from morseig.families.builtin_families import builtin, constant_family
from morseig.polyalg.fields import Field
from morseig.polyalg.int_poly import IntPoly
from morseig.spectral.eig_clusters import cluster_at
from morseig.spectral.h_operator import h_operator
from morseig.spectral.self_adjoint import eig_sorted
from morseig.stratum.extremum import Extremum

T = IntPoly.monomial(1)
ORIGIN2 = np.zeros(2)
DIRAC_POINT = np.array([2 * np.pi / 3, 4 * np.pi / 3])


def h_at(name: str, x, k: int = 1):
    fam = builtin(name)
    c = cluster_at(eig_sorted(fam(x)), k)
    return fam, h_operator(fam, x, c)


def signature(c: Classification) -> tuple:
    return (c.kind, c.diagnostics.nu, c.diagnostics.rel_index, c.mu, c.contribution)


def test_symmetric_cone_lower_branch_is_max():
    c = classify_point(builtin("cone-symmetric"), ORIGIN2, 1)
    v = c.verdict
    assert isinstance(v, NonDegenerateCritical)
    assert (v.nu, v.rel_index, v.mu, v.tangent_dim) == (2, 2, 0, 0)
    assert v.contribution == T * T
    assert v.extremum is Extremum.max
    assert c.is_critical and c.is_conclusive
    assert c.diagnostics.rank == 2 and c.diagnostics.complement_dim == 1
    assert c.diagnostics.transversal
    assert c.diagnostics.condition_n_margin == pytest.approx(1 / np.sqrt(2))


def test_symmetric_cone_upper_branch_is_min():
    c = classify_point(builtin("cone-symmetric"), ORIGIN2, 2)
    v = c.verdict
    assert isinstance(v, NonDegenerateCritical)
    assert (v.rel_index, v.mu) == (1, 0)
    assert v.contribution == IntPoly.one()
    assert v.extremum is Extremum.min
    assert c.value == pytest.approx(0.0)


def test_tilted_cone_is_regular():
    fam, h = h_at("cone-tilted", ORIGIN2)
    reg = check_regular(h)
    assert isinstance(reg, RegularCertified)
    assert clarke_bound(h, -reg.witness) < -DEFAULT_OPTIONS.tol_def
    n = check_condition_N(h)
    assert isinstance(n, NFails) and n.reason is NFailure.complement_not_definite
    assert np.allclose(n.b, np.diag([2.0, -1.0]) / np.sqrt(5))

    for k in (1, 2):
        c = classify_point(fam, ORIGIN2, k)
        assert isinstance(c.verdict, Regular)
        assert not c.is_critical
        assert c.contribution.is_zero()
        assert np.isclose(np.linalg.norm(c.verdict.witness_direction), 1.0)


def test_symmetric_cone_conditions():
    _fam, h = h_at("cone-symmetric", ORIGIN2)
    assert isinstance(check_regular(h), NotCertified)
    n = check_condition_N(h)
    assert isinstance(n, NHolds)
    assert np.allclose(n.b, np.eye(2) / np.sqrt(2))
    assert check_transversality(h, Field.real)
    assert clarke_bound(h, [1.0, 0.0]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        clarke_bound(h, [0.0, 0.0])


def test_borderline_family():
    fam, h = h_at("borderline", ORIGIN2)
    n = check_condition_N(h)
    assert isinstance(n, NFails) and n.reason is NFailure.complement_not_definite
    assert np.allclose(n.b, np.diag([0.0, 1.0]))
    for k in (1, 2):
        c = classify_point(fam, ORIGIN2, k)
        assert isinstance(c.verdict, Borderline)
        assert "condition (N) fails" in c.verdict.reason
        assert np.allclose(c.verdict.complement_matrix, np.diag([0.0, 1.0]))
        assert not c.is_conclusive
        assert c.contribution.is_zero()


def test_graphene_dirac_point_not_covered():
    fam, h = h_at("graphene-t2", DIRAC_POINT)
    assert h.nu == 2
    assert not check_transversality(h, Field.complex)
    for k in (1, 2):
        c = classify_point(fam, DIRAC_POINT, k)
        assert isinstance(c.verdict, NotCovered)
        assert "excessive multiplicity" in c.verdict.reason
        assert not c.is_conclusive


def test_cubic_inflection_is_not_nondegenerate():
    fam = builtin("cubic-inflection")
    c = classify_point(fam, [0.0], 1)
    assert isinstance(c.verdict, SmoothCritical)
    assert not c.verdict.nondegenerate
    assert c.contribution.is_zero()
    assert not c.is_conclusive
    assert isinstance(classify_point(fam, [0.5], 1).verdict, Regular)


def test_constant_family_has_no_nondegenerate_points():
    fam = constant_family(np.diag([1.0, 2.0, 2.0]), d=2)
    for k in (1, 2, 3):
        c = classify_point(fam, [0.3, 0.1], k)
        assert not isinstance(c.verdict, NonDegenerateCritical | Regular)
        assert c.contribution.is_zero()
    zero_h = h_operator(fam, [0.0, 0.0], cluster_at(eig_sorted(fam([0.0, 0.0])), 2))
    assert clarke_bound(zero_h, [1.0, 1.0]) == 0.0


def test_smooth_points_of_real2band():
    fam = builtin("real2band-t2")
    c = classify_point(fam, [np.pi / 2, np.pi / 2], 1)
    assert isinstance(c.verdict, SmoothCritical)
    assert (c.verdict.mu, c.verdict.nondegenerate) == (0, True)
    assert c.contribution == IntPoly.one()
    c = classify_point(fam, [np.pi / 2, 0.0], 1)
    assert isinstance(c.verdict, SmoothCritical)
    assert c.verdict.mu == 1 and c.contribution == T
    assert isinstance(classify_point(fam, [0.3, 0.4], 1).verdict, Regular)


def test_weyl_node_contributes_t3():
    fam = builtin("weyl-t3")
    lower = classify_point(fam, np.zeros(3), 1)
    upper = classify_point(fam, np.zeros(3), 2)
    assert isinstance(lower.verdict, NonDegenerateCritical)
    assert lower.contribution == IntPoly.monomial(3)
    assert lower.verdict.extremum is Extremum.max
    assert upper.contribution == IntPoly.one()
    assert upper.verdict.extremum is Extremum.min


def test_nodal_line_point_has_one_dimensional_stratum():
    fam = builtin("nodal-line-t3")
    c = classify_point(fam, np.zeros(3), 1)
    v = c.verdict
    assert isinstance(v, NonDegenerateCritical)
    assert (v.tangent_dim, v.mu) == (1, 1)
    assert v.contribution == IntPoly.monomial(3)
    assert v.extremum is Extremum.max
    assert c.diagnostics.kernel_angle is not None and c.diagnostics.kernel_angle <= 1e-6

    v2 = classify_point(fam, np.zeros(3), 2).verdict
    assert isinstance(v2, NonDegenerateCritical)
    assert v2.contribution == T
    assert v2.extremum is Extremum.neither


INVARIANCE_CASES = [
    ("cone-symmetric", (0.0, 0.0), 1),
    ("real2band-t2", (np.pi, 0.0), 1),
    ("real2band-t2", (np.pi / 2, 0.0), 2),
]


@pytest.mark.parametrize("name,x,k", INVARIANCE_CASES)
def test_classification_invariance(name: str, x: tuple[float, float], k: int):
    fam = builtin(name)
    base = signature(classify_point(fam, x, k))
    rng = np.random.default_rng(42)
    for _ in range(100):
        w = np.linalg.qr(rng.normal(size=(2, 2)))[0]
        assert signature(classify_point(fam.conjugated(w), x, k)) == base
        assert signature(classify_point(fam.shifted(float(rng.uniform(-3, 3))), x, k)) == base
        assert signature(classify_point(fam.scaled(float(rng.uniform(0.2, 5))), x, k)) == base


def test_weyl_invariance_under_unitary_conjugation():
    fam = builtin("weyl-t3")
    base = signature(classify_point(fam, np.zeros(3), 1))
    rng = np.random.default_rng(7)
    for _ in range(100):
        w = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        assert signature(classify_point(fam.conjugated(w), np.zeros(3), 1)) == base


def test_definite_in_span_examples():
    sz, sx = np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])
    res = definite_in_span([sz, sx])
    assert isinstance(res, NotFound) and res.best_margin <= DEFAULT_OPTIONS.tol_def
    res = definite_in_span([np.diag([1.0, 2.0]), sx])
    assert isinstance(res, Found)
    assert res.margin == pytest.approx(1.0, abs=1e-6)
    assert definite_in_span([]).found is False
    assert definite_in_span([np.array([[0.0]])]).found is False
    assert definite_in_span([np.array([[-2.0]])]).found


@pytest.mark.parametrize("nu", [2, 3])
def test_definite_in_span_agrees_with_sampling(nu: int):
    rng = np.random.default_rng(nu)
    tol = DEFAULT_OPTIONS.tol_def
    for trial in range(500):
        m = 2 + trial % 2
        basis = []
        for _ in range(m):
            a = rng.normal(size=(nu, nu))
            basis.append(0.5 * (a + a.T))
        oracle = sphere_sampling_margin(basis, 20000, seed=trial)
        res = definite_in_span(basis)
        # Sampling only bounds the optimum from below, so compare away from the boundary.
        if oracle > max(10 * tol, 1e-3):
            assert isinstance(res, Found)
        if oracle < -0.1:
            assert isinstance(res, NotFound)
        if isinstance(res, Found):
            assert res.margin >= oracle - 1e-3
