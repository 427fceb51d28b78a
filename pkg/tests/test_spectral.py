import dataclasses

import numpy as np
import pytest

from morseig.classify.definiteness import definite_in_span
from morseig.errors import NotIsometryError, NotSelfAdjointError
from morseig.families.builtin_families import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    builtin,
    constant_family,
)
from morseig.families.matrix_family import TWO_PI
from morseig.families.random_family import random_family
from morseig.pipeline.hf_check import degenerate_at
from morseig.polyalg.fields import Field, sym_dim
from morseig.spectral.branch_derivatives import branch_gradient, branch_hessian
from morseig.spectral.eig_clusters import cluster_at, make_cluster
from morseig.spectral.h_operator import (
    HOperator,
    complement_basis,
    compress,
    differential,
    h_operator,
    hf_slopes,
    kernel_basis,
)
from morseig.spectral.self_adjoint import as_self_adjoint, eig_sorted, eigvals_sorted
from morseig.spectral.sym_space import (
    in_definite_cone,
    sym2_coordinates,
    sym_basis,
    sym_coordinates,
    sym_from_coordinates,
)


def _random_hermitian(rng: np.random.Generator, n: int, f: Field) -> np.ndarray:
    a = rng.normal(size=(n, n))
    if f is Field.complex:
        a = a + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def _random_isometry(rng: np.random.Generator, n: int, nu: int, f: Field) -> np.ndarray:
    a = rng.normal(size=(n, nu))
    if f is Field.complex:
        a = a + 1j * rng.normal(size=(n, nu))
    return np.linalg.qr(a)[0]


@pytest.mark.parametrize("f", list(Field))
def test_eig_sorted_residual(f: Field):
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        a = _random_hermitian(rng, n, f) * float(rng.uniform(0.1, 10.0))
        s = eig_sorted(a)
        assert np.all(np.diff(s.eigenvalues) >= 0)
        assert s.residual(a) <= 1e-9 * (1 + np.linalg.norm(a))
        v = s.eigenvectors
        assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_as_self_adjoint_validation():
    with pytest.raises(NotSelfAdjointError):
        as_self_adjoint(np.zeros((2, 3)))
    with pytest.raises(NotSelfAdjointError):
        as_self_adjoint(SIGMA_Y, Field.real)
    m = as_self_adjoint(np.array([[1.0, 2.0 + 1e-15], [2.0, 0.0]]))
    assert np.array_equal(m, m.T)


def test_clusters_group_degenerate_eigenvalues():
    s = eig_sorted(np.diag([1.0, 1.0, 1.0 + 1e-9, 4.0]))
    c = cluster_at(s, 2)
    assert (c.lo, c.hi, c.nu, c.rel_index) == (1, 3, 3, 2)
    assert c.gap_above == pytest.approx(3.0)
    assert c.gap_below == np.inf
    with pytest.raises(ValueError):
        make_cluster(s, 4, 1, 3)


@pytest.mark.parametrize("f", list(Field))
def test_sym_coordinates_invert(f: Field):
    rng = np.random.default_rng(11)
    for nu in (1, 2, 3, 4):
        x = _random_hermitian(rng, nu, f)
        c = sym_coordinates(x, f)
        assert c.shape == (sym_dim(nu, f),)
        assert np.allclose(sym_from_coordinates(c, nu, f), x)
        assert np.isclose(np.linalg.norm(c), np.linalg.norm(x))
    assert len(sym_basis(2, Field.complex)) == 4


def test_sym2_chart_matches_definiteness():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = _random_hermitian(rng, 2, Field.real)
        w = np.linalg.eigvalsh(a)
        definite = w[0] > 0 or w[1] < 0
        assert in_definite_cone(*sym2_coordinates(a)) == definite


def test_compress_requires_isometry():
    with pytest.raises(NotIsometryError):
        compress(np.eye(2), np.array([[1.0], [1.0]]))


@pytest.mark.parametrize("f", list(Field))
def test_eigenvalue_stability(f: Field):
    rng = np.random.default_rng(19)
    for _ in range(300):
        n = int(rng.integers(1, 9))
        a = _random_hermitian(rng, n, f)
        e = _random_hermitian(rng, n, f) * 10.0 ** float(rng.uniform(-6, 0))
        shift = np.abs(eigvals_sorted(a + e) - eigvals_sorted(a))
        assert np.all(shift <= np.linalg.norm(e, 2) + 1e-12)


@pytest.mark.parametrize("f", list(Field))
def test_compress_interlaces(f: Field):
    rng = np.random.default_rng(21)
    for _ in range(300):
        n = int(rng.integers(1, 9))
        nu = int(rng.integers(1, n + 1))
        x = _random_hermitian(rng, n, f)
        lam = eigvals_sorted(x)
        mu = eigvals_sorted(compress(x, _random_isometry(rng, n, nu, f)))
        slack = 1e-10 * (1 + np.linalg.norm(x))
        assert np.all(lam[:nu] <= mu + slack)
        assert np.all(mu <= lam[n - nu :] + slack)


def test_cone_compression_map():
    fam = builtin("cone-symmetric")
    s = eig_sorted(fam([0.0, 0.0]))
    c = cluster_at(s, 1)
    assert c.nu == 2
    h = h_operator(fam, [0.0, 0.0], c)
    assert h.rank() == 2
    comp = complement_basis(h)
    assert len(comp) == 1
    b = comp[0] if np.trace(comp[0]) > 0 else -comp[0]
    assert np.allclose(b, np.eye(2) / np.sqrt(2))
    assert kernel_basis(h).shape == (2, 0)
    # Slopes along (1, 0) are the eigenvalues of sigma_z.
    assert np.allclose(hf_slopes(fam, [0.0, 0.0], [1.0, 0.0], c), [-1.0, 1.0])


def test_weyl_complement_is_identity():
    fam = builtin("weyl-t3")
    x = np.zeros(3)
    c = cluster_at(eig_sorted(fam(x)), 1)
    h = h_operator(fam, x, c)
    for img, pauli in zip(h.images, (SIGMA_X, SIGMA_Y, SIGMA_Z), strict=True):
        assert np.isclose(abs(np.trace(img @ pauli)), 2.0)
    comp = complement_basis(h)
    assert len(comp) == 1
    assert np.isclose(abs(np.trace(comp[0])), np.sqrt(2))


def test_finite_difference_differential_matches_analytic():
    fam = random_family(4, 2, 3, Field.complex)
    x = np.array([0.3, -1.2])
    analytic = fam.diff(x)
    assert analytic is not None
    numeric_fam = dataclasses.replace(fam, analytic_diff=None)
    numeric = differential(numeric_fam, x)
    for a, b in zip(analytic, numeric, strict=True):
        assert np.allclose(a, b, atol=1e-8)


def test_branch_derivatives_on_real2band():
    fam = builtin("real2band-t2")
    # lambda_1 = -sqrt(sin^2 x1 + sin^2 x2) has a saddle at (pi/2, 0).
    x = np.array([np.pi / 2, 0.0])
    assert np.linalg.norm(branch_gradient(fam, x, 1)) < 1e-12
    hess = branch_hessian(fam, x, 1)
    assert np.allclose(hess, np.diag([1.0, -1.0]), atol=1e-5)
    # Away from critical points the gradient agrees with a central difference.
    y = np.array([0.4, 1.1])
    e = 1e-6
    steps = e * np.eye(2)
    fd = [
        (np.linalg.eigvalsh(fam(y + s))[0] - np.linalg.eigvalsh(fam(y - s))[0]) / (2 * e)
        for s in steps
    ]
    assert np.allclose(branch_gradient(fam, y, 1), fd, atol=1e-7)


@pytest.mark.parametrize("f", list(Field))
def test_rank_nullity(f: Field):
    rng = np.random.default_rng(23)
    for _ in range(200):
        nu = int(rng.integers(1, 5))
        d = int(rng.integers(1, 8))
        r = int(rng.integers(1, d + 1))
        gens = np.stack([_random_hermitian(rng, nu, f) for _ in range(r)])
        images = tuple(np.einsum("j,jab->ab", row, gens) for row in rng.normal(size=(d, r)))
        h = HOperator(images=images, field=f)
        rank = h.rank()
        assert rank == min(r, sym_dim(nu, f))
        comp = complement_basis(h)
        ker = kernel_basis(h)
        assert len(comp) + rank == sym_dim(nu, f)
        assert ker.shape == (d, d - rank)
        for b in comp:
            assert all(abs(np.trace(b @ img).real) < 1e-8 for img in images)
        for v in ker.T:
            assert np.linalg.norm(h.apply(v)) < 1e-8


DEGENERATE_POINTS = [
    ("cone-symmetric", (0.0, 0.0), 1),
    ("weyl-t3", (0.0, 0.0, 0.0), 1),
    ("nodal-line-t3", (0.0, 0.0, 0.0), 1),
]


@pytest.mark.parametrize("name,x,k", DEGENERATE_POINTS)
def test_hf_slopes_scale_with_direction(name: str, x: tuple[float, ...], k: int):
    fam = builtin(name)
    c = cluster_at(eig_sorted(fam(x)), k)
    assert c.nu == 2
    rng = np.random.default_rng(27)
    for _ in range(20):
        v = rng.normal(size=fam.d)
        a = float(rng.uniform(0.1, 10.0))
        base = hf_slopes(fam, x, v, c)
        assert np.allclose(hf_slopes(fam, x, a * v, c), a * base, atol=1e-12)
        # Reversing the direction reverses the order of the slopes.
        assert np.allclose(hf_slopes(fam, x, -a * v, c), -a * base[::-1], atol=1e-12)
    with pytest.raises(ValueError):
        hf_slopes(fam, x, np.zeros(fam.d), c)


def test_constant_family_has_zero_slopes():
    fam = constant_family(np.diag([1.0, 1.0, 2.0]), 2)
    x = [0.3, 0.1]
    c = cluster_at(eig_sorted(fam(x)), 1)
    assert c.nu == 2
    assert np.allclose(hf_slopes(fam, x, [1.0, -2.0], c), 0.0)
    assert h_operator(fam, x, c).rank() == 0


@pytest.mark.parametrize("f", list(Field))
def test_h_operator_invariant_under_isometry_change(f: Field):
    """
    Replacing the eigenvector basis `U` of a double eigenvalue by `U W` changes the images
    by unitary conjugation only: rank, slopes and the definiteness of the complement stay.
    """
    rng = np.random.default_rng(33)
    # With these d the complement of the range in Sym_2 is one-dimensional.
    d = 2 if f is Field.real else 3
    verdicts = set()
    for _ in range(60):
        x = rng.uniform(0.0, TWO_PI, size=d)
        fam = degenerate_at(random_family(int(rng.integers(2**31)), d, 4, f), x, 2)
        c = cluster_at(eig_sorted(fam(x)), 2)
        assert c.nu == 2
        w = _random_isometry(rng, 2, 2, f)
        turned = dataclasses.replace(c, isometry_U=c.isometry_U @ w)
        h, h_turned = h_operator(fam, x, c), h_operator(fam, x, turned)
        assert h_turned.rank() == h.rank() == d
        assert np.allclose(h_turned.singular_values(), h.singular_values(), atol=1e-10)
        for a, b in zip(h.images, h_turned.images, strict=True):
            assert np.allclose(b, w.conj().T @ a @ w, atol=1e-10)
        v = rng.normal(size=d)
        assert np.allclose(h_turned.slopes(v), h.slopes(v), atol=1e-10)
        found = definite_in_span(complement_basis(h)).found
        assert definite_in_span(complement_basis(h_turned)).found == found
        verdicts.add(found)
    assert verdicts == {True, False}
