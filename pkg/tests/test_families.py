import numpy as np
import pytest
from pydantic import ValidationError

from morseig.errors import DomainError, FamilySpecError, NotIsometryError, UnknownFamilyError
from morseig.families.builtin_families import BUILTINS, builtin, constant_family, load_family
from morseig.families.matrix_family import TWO_PI, Domain, direct_sum
from morseig.families.random_family import one_sided_harmonics, random_family, random_spec
from morseig.families.trig_poly import (
    MatrixEntries,
    TrigPolySpec,
    TrigTerm,
    from_spec,
    load_spec,
    save_spec,
)
from morseig.polyalg.fields import Field


def scalar_cos_family() -> TrigPolySpec:
    """`3 + 0.5 (cos x1 + cos x2)` as a 1x1 family on T^2."""
    return TrigPolySpec(
        name="scalar-cos",
        d=2,
        n=1,
        terms=[TrigTerm(m=[1, 0], re=[[0.5]]), TrigTerm(m=[0, 1], re=[[0.5]])],
        constant=MatrixEntries(re=[[3.0]]),
    )


@pytest.mark.parametrize("name", list(BUILTINS))
def test_builtins_are_self_adjoint(name: str):
    fam = builtin(name)
    rng = np.random.default_rng(0)
    xs = rng.uniform(-1.0, 1.0, size=(5, fam.d))
    many = fam.evaluate_many(xs)
    assert many.shape == (5, fam.n, fam.n)
    for x, m in zip(xs, many, strict=True):
        a = fam(x)
        assert np.allclose(a, a.conj().T)
        assert np.allclose(a, m)
        diff = fam.diff(x)
        assert diff is not None and len(diff) == fam.d


def test_unknown_family():
    with pytest.raises(UnknownFamilyError) as e:
        builtin("no-such-family")
    assert isinstance(e.value, KeyError)
    assert "no-such-family" in str(e.value)
    with pytest.raises(FileNotFoundError):
        load_family("missing-family.json")


def test_point_validation_and_wrap():
    fam = builtin("real2band-t2")
    with pytest.raises(DomainError):
        fam([0.0, 0.0, 0.0])
    assert np.allclose(fam.wrap([-0.5, 7.0]), [TWO_PI - 0.5, 7.0 - TWO_PI])
    chart = builtin("cone-symmetric")
    assert np.allclose(chart.wrap([-0.5, 7.0]), [-0.5, 7.0])


def test_trig_poly_evaluation():
    fam = from_spec(scalar_cos_family())
    x = np.array([0.3, 2.0])
    assert np.isclose(fam(x)[0, 0], 3.0 + 0.5 * (np.cos(0.3) + np.cos(2.0)))
    diff = fam.diff(x)
    assert np.isclose(diff[0][0, 0], -0.5 * np.sin(0.3))
    assert np.isclose(diff[1][0, 0], -0.5 * np.sin(2.0))


def test_trig_poly_complex_term():
    # Herm(C e^{i x}) with C = [[0, 1], [0, 0]] is [[0, e^{ix}/2], [e^{-ix}/2, 0]].
    spec = TrigPolySpec(d=1, n=2, field=Field.complex, terms=[TrigTerm(m=[1], re=[[0, 1], [0, 0]])])
    fam = from_spec(spec)
    a = fam([0.7])
    assert np.isclose(a[0, 1], 0.5 * np.exp(0.7j))
    assert np.allclose(np.linalg.eigvalsh(a), [-0.5, 0.5])


def test_spec_validation():
    with pytest.raises(FamilySpecError):
        from_spec(TrigPolySpec(d=1, n=2, terms=[TrigTerm(m=[1], re=[[0, 1], [0, 0]])]))
    with pytest.raises(FamilySpecError):
        from_spec(TrigPolySpec(d=2, n=1, terms=[TrigTerm(m=[1], re=[[1.0]])]))
    with pytest.raises(FamilySpecError):
        from_spec(TrigPolySpec(d=1, n=1, constant=MatrixEntries(re=[[1.0]], im=[[1.0]])))
    with pytest.raises(ValidationError):
        TrigPolySpec.model_validate({"d": 1, "n": 1, "colour": "red"})
    with pytest.raises(ValidationError):
        TrigPolySpec.model_validate({"d": 0, "n": 1})


def test_spec_file_roundtrip(tmp_path):
    path = tmp_path / "families" / "scalar.json"
    save_spec(scalar_cos_family(), path)
    assert load_spec(path) == scalar_cos_family()
    fam = load_family(path)
    assert fam.name == "scalar-cos"
    assert np.isclose(fam([0.0, 0.0])[0, 0], 4.0)
    path.write_text('{"d": 1, "n": 1, "terms": "nope"}')
    with pytest.raises(ValidationError):
        load_family(path)


def test_random_family_is_deterministic():
    assert one_sided_harmonics(2, 1) == [(0, 1), (1, -1), (1, 0), (1, 1)]
    assert random_spec(7, 2, 3, Field.real) == random_spec(7, 2, 3, Field.real)
    assert random_spec(7, 2, 3, Field.real) != random_spec(8, 2, 3, Field.real)
    for f in Field:
        fam = random_family(7, 2, 3, f)
        assert fam.field is f
        a = fam([0.1, 0.2])
        assert np.allclose(a, a.conj().T)
    with pytest.raises(ValueError):
        random_spec(0, 1, 1, Field.real, max_harmonic=0)


def test_invariant_transformations():
    fam = random_family(3, 2, 3, Field.complex)
    x = np.array([0.4, -0.9])
    rng = np.random.default_rng(1)
    w = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    base = np.linalg.eigvalsh(fam(x))
    assert np.allclose(np.linalg.eigvalsh(fam.conjugated(w)(x)), base)
    assert np.allclose(np.linalg.eigvalsh(fam.shifted(2.5)(x)), base + 2.5)
    assert np.allclose(np.linalg.eigvalsh(fam.scaled(3.0)(x)), 3.0 * base)
    assert np.allclose(fam.scaled(3.0).diff(x)[0], 3.0 * fam.diff(x)[0])
    with pytest.raises(ValueError):
        fam.scaled(0.0)
    with pytest.raises(NotIsometryError):
        fam.conjugated(2.0 * np.eye(3))
    with pytest.raises(DomainError):
        fam.conjugated(np.eye(2))


def test_offset_family():
    fam = builtin("real2band-t2")
    c = np.array([[1.0, 0.5], [0.5, -1.0]])
    moved = fam.offset(c)
    x = np.array([0.7, 1.9])
    assert np.allclose(moved(x), fam(x) + c)
    for a, b in zip(fam.diff(x) or [], moved.diff(x) or [], strict=True):
        assert np.array_equal(a, b)
    assert np.allclose(moved.evaluate_many(np.array([x, 2 * x]))[1], fam(2 * x) + c)
    with pytest.raises(DomainError):
        fam.offset(np.eye(3))


def test_real_conjugation_keeps_field():
    fam = builtin("real2band-t2")
    c, s = np.cos(0.3), np.sin(0.3)
    rot = fam.conjugated(np.array([[c, -s], [s, c]]))
    assert rot.field is Field.real
    assert np.allclose(np.linalg.eigvalsh(rot([1.0, 2.0])), np.linalg.eigvalsh(fam([1.0, 2.0])))


def test_direct_sum_and_constant():
    band = builtin("real2band-t2")
    total = direct_sum(band, from_spec(scalar_cos_family()))
    assert (total.n, total.d, total.field) == (3, 2, Field.real)
    x = np.array([0.5, 1.5])
    expected = sorted([*np.linalg.eigvalsh(band(x)), 3.0 + 0.5 * (np.cos(0.5) + np.cos(1.5))])
    assert np.allclose(np.linalg.eigvalsh(total(x)), expected)
    assert np.allclose(total.evaluate_many(x[None, :])[0], total(x))
    # real2band builds its differential analytically, so the sum does too.
    assert total.diff(x) is not None

    const = constant_family(np.diag([1.0, 2.0]), d=3)
    assert all(np.allclose(m, 0.0) for m in const.diff([0.1, 0.2, 0.3]))
    assert const.evaluate_many(np.zeros((4, 3))).shape == (4, 2, 2)
    with pytest.raises(DomainError):
        direct_sum(band, builtin("cone-symmetric"))
    assert builtin("cone-symmetric").domain is Domain.chart
