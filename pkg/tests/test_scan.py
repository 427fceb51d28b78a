import numpy as np
import pytest

from morseig.classify.classification import NonDegenerateCritical, SmoothCritical
from morseig.config.morseig_env import DEFAULT_OPTIONS
from morseig.errors import DomainError
from morseig.families.builtin_families import builtin, constant_family
from morseig.families.matrix_family import TWO_PI, MatrixFamily, direct_sum
from morseig.families.trig_poly import MatrixEntries, TrigPolySpec, TrigTerm, from_spec
from morseig.pipeline.corollaries import ConseqStatus, conseq_check
from morseig.pipeline.morse_report import CandidateSource
from morseig.pipeline.report_io import MorseReportRecord, to_json
from morseig.pipeline.scan import Candidate, canonical, merge_candidates, scan, scan_all
from morseig.pipeline.torus_grid import grid_spectra, torus_distance
from morseig.polyalg.int_poly import IntPoly
from morseig.polyalg.morse_poly import Satisfied
from morseig.stratum.extremum import Extremum

P = IntPoly.parse
CONE_POINTS = [(0.0, 0.0), (0.0, np.pi), (np.pi, 0.0), (np.pi, np.pi)]


def three_band() -> MatrixFamily:
    scalar = from_spec(
        TrigPolySpec(
            name="scalar-cos",
            d=2,
            n=1,
            terms=[TrigTerm(m=[1, 0], re=[[0.5]]), TrigTerm(m=[0, 1], re=[[0.5]])],
            constant=MatrixEntries(re=[[3.0]]),
        )
    )
    return direct_sum(builtin("real2band-t2"), scalar)


@pytest.fixture(scope="module")
def real2band_reports():
    return scan_all(builtin("real2band-t2"), 32)


def test_real2band_lower_branch(real2band_reports):
    fam = builtin("real2band-t2")
    r = real2band_reports[0]
    assert r.k == 1
    assert r.p_morse == P("4+8t+4t^2")
    assert isinstance(r.verdict, Satisfied) and r.verdict.remainder == P("3+3t")
    assert r.satisfied and not r.inconclusive
    assert r.exit_code == 0
    assert r.c_mu == {0: 4, 1: 8}
    assert r.d_mu == {0: P("4t^2")}
    assert r.p_smooth == P("4+8t")

    cones = [cp for cp in r.reports if isinstance(cp.classification.verdict, NonDegenerateCritical)]
    assert len(cones) == 4
    for cp in cones:
        v = cp.classification.verdict
        assert v.contribution == P("t^2") and v.extremum is Extremum.max
        assert cp.source is CandidateSource.degenerate
        assert cp.residual <= 1e-9
        assert min(torus_distance(cp.location, np.array(c)) for c in CONE_POINTS) <= 1e-8
    smooth = [cp for cp in r.reports if isinstance(cp.classification.verdict, SmoothCritical)]
    assert len(smooth) == 12
    for cp in r.reports:
        assert cp.value == pytest.approx(np.linalg.eigvalsh(fam(cp.location))[0], abs=1e-8)
        assert np.all((cp.location >= 0) & (cp.location < TWO_PI))
    for cp in smooth:
        assert cp.residual <= 1e-7
    locs = [tuple(cp.location) for cp in r.reports]
    assert locs == sorted(locs)


def test_real2band_upper_branch_and_extremes(real2band_reports):
    lower, upper = real2band_reports
    assert upper.p_morse == P("4+8t+4t^2")
    assert upper.c_mu == {1: 8, 2: 4}
    assert upper.d_mu == {0: P("4")}
    assert lower.value_max == pytest.approx(0.0, abs=1e-12)
    assert lower.value_min == pytest.approx(-np.sqrt(2))
    assert upper.value_max == pytest.approx(np.sqrt(2))


def test_real2band_stratum_inequality(real2band_reports):
    for r in real2band_reports:
        assert r.stratum_complete
        assert len(r.stratum_points) == 4
        res = conseq_check(r)
        assert res.status is ConseqStatus.passed
        assert res.left == r.p_morse


@pytest.mark.parametrize("k", [1, 2])
def test_weyl_scan(k: int):
    r = scan(builtin("weyl-t3"), k, 24)
    assert r.p_morse == P("8+24t+24t^2+8t^3")
    assert isinstance(r.verdict, Satisfied) and r.verdict.remainder == P("7+14t+7t^2")
    assert not r.inconclusive
    nodes = [cp for cp in r.reports if isinstance(cp.classification.verdict, NonDegenerateCritical)]
    assert len(nodes) == 8
    expected = P("t^3") if k == 1 else P("1")
    assert all(cp.classification.contribution == expected for cp in nodes)


def test_constant_family_is_flagged():
    r = scan(constant_family(np.diag([1.0, 2.0]), d=2), 1, 8)
    assert r.reports == ()
    assert r.p_morse.is_zero()
    assert not r.satisfied
    assert r.inconclusive and "not_covered" in r.flags[0]
    assert r.exit_code == 3
    assert conseq_check(r).status is ConseqStatus.skipped


def test_three_band_direct_sum():
    fam = three_band()
    reports = scan_all(fam, 32)
    assert [r.p_morse for r in reports] == [P("4+8t+4t^2"), P("4+8t+4t^2"), P("1+2t+t^2")]
    assert all(r.satisfied and not r.inconclusive for r in reports)
    top = reports[2]
    assert top.c_mu == {0: 1, 1: 2, 2: 1}
    assert top.stratum_points == ()
    assert conseq_check(reports[1]).status is ConseqStatus.passed
    assert conseq_check(top).left == top.p_morse


def test_scan_is_deterministic():
    fam = builtin("real2band-t2")
    serial = to_json(MorseReportRecord.of(scan(fam, 1, 16)))
    again = to_json(MorseReportRecord.of(scan(fam, 1, 16)))
    threaded_opts = DEFAULT_OPTIONS.with_overrides(workers=3)
    threaded = to_json(MorseReportRecord.of(scan(fam, 1, 16, threaded_opts)))
    assert serial == again == threaded


def test_grid_refinement_is_stable():
    fam = builtin("real2band-t2")
    coarse, fine = scan(fam, 1, 32), scan(fam, 1, 64)
    assert coarse.p_morse == fine.p_morse
    kinds = [sorted(cp.classification.kind for cp in r.reports) for r in (coarse, fine)]
    assert kinds[0] == kinds[1]


def test_scan_validation():
    with pytest.raises(DomainError):
        scan(builtin("cone-symmetric"), 1, 16)
    fam = builtin("real2band-t2")
    with pytest.raises(ValueError):
        scan(fam, 1, 4)
    with pytest.raises(ValueError):
        scan(fam, 3, 16)
    with pytest.raises(ValueError):
        scan(fam, 1, 32, spectra=grid_spectra(fam, 16))


def test_canonical_and_merge():
    assert np.allclose(canonical(np.array([-1e-13, 7.0])), [0.0, 7.0 - TWO_PI], rtol=0, atol=1e-15)
    assert canonical(np.array([-1e-13]))[0] == 0.0

    def cand(x: float, residual: float, basin: int) -> Candidate:
        return Candidate(np.array([x, 1.0]), residual, basin, CandidateSource.smooth)

    merged = merge_candidates(
        [cand(0.01, 1e-9, 0), cand(TWO_PI - 0.01, 1e-12, 1), cand(3.0, 1e-8, 2)], radius=0.05
    )
    assert [c.basin for c in merged] == [2, 1]
