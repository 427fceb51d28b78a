import numpy as np
import pytest

from morseig.errors import DomainError, ProjectorContinuationError
from morseig.families.builtin_families import NODAL_RING_WOBBLE, builtin
from morseig.spectral.eig_clusters import cluster_at
from morseig.spectral.h_operator import h_operator, hf_slopes
from morseig.spectral.self_adjoint import eig_sorted
from morseig.stratum.stratum_chart import (
    locate_stratum_critical,
    project_to_stratum,
    reference_at,
    restricted_hessian,
    stratum_chart,
    tangent_basis,
)
from morseig.stratum.stratum_residual import StratumRef, evaluate_residual, stratum_residual
from morseig.stratum.stratum_trace import TraceStop, polyline_csv, trace_stratum

EPS = NODAL_RING_WOBBLE


def ring_point(t: float) -> np.ndarray:
    return np.array([EPS * np.sin(t), 0.0, t])


def ring_deviation(points: np.ndarray) -> float:
    """Largest distance in `x1` of segment midpoints from the analytic ring."""
    mids = 0.5 * (points[1:] + points[:-1])
    return float(np.max(np.abs(mids[:, 0] - EPS * np.sin(mids[:, 2]))))


def test_residual_vanishes_on_ring():
    fam = builtin("nodal-ring-t3")
    ref = reference_at(fam, ring_point(0.0), 1)
    for t in np.linspace(-1.0, 1.0, 9):
        assert np.linalg.norm(stratum_residual(fam, ring_point(t), ref)) <= 1e-10


def test_cone_residual_is_linear():
    fam = builtin("cone-symmetric")
    ref = reference_at(fam, [0.0, 0.0], 1)
    assert (ref.lo, ref.hi, ref.nu, ref.rel_index) == (1, 2, 2, 2)
    x = np.array([0.1, -0.05])
    assert np.allclose(stratum_residual(fam, x, ref), [np.sqrt(2) * x[1], x[0]])


def test_continuation_rejects_rotated_basis():
    fam = builtin("cone-symmetric")
    ref = StratumRef(k=1, lo=1, hi=1, u_ref=np.array([[1.0], [0.0]]))
    with pytest.raises(ProjectorContinuationError):
        evaluate_residual(fam, [1.0, 0.0], ref)


def test_projection_to_cone_tip():
    fam = builtin("cone-symmetric")
    proj = project_to_stratum(fam, [0.1, -0.05], 1)
    assert np.linalg.norm(proj.x) <= 1e-9
    assert proj.iterations >= 1
    again = project_to_stratum(fam, proj.x, 1, ref=proj.ref)
    assert again.iterations == 0
    assert np.array_equal(again.x, proj.x)


def test_projection_to_weyl_node():
    fam = builtin("weyl-t3")
    proj = project_to_stratum(fam, [0.01, -0.02, 0.015], 1)
    assert np.linalg.norm(proj.x) <= 1e-9
    assert proj.residual_norm <= 2e-10


def test_tangent_spaces():
    assert tangent_basis(builtin("cone-symmetric"), [0.0, 0.0], 1).shape == (2, 0)

    fam = builtin("nodal-line-t3")
    x = np.zeros(3)
    basis = tangent_basis(fam, x, 1)
    assert basis.shape == (3, 1)
    assert np.allclose(np.abs(basis[:, 0]), [0.0, 0.0, 1.0], atol=1e-8)
    c = cluster_at(eig_sorted(fam(x)), 1)
    v = basis[:, 0]
    assert np.linalg.norm(h_operator(fam, x, c).apply(v)) <= 1e-6
    assert np.allclose(hf_slopes(fam, x, v, c), 0.0, atol=1e-6)


def test_restricted_hessian_on_nodal_line():
    fam = builtin("nodal-line-t3")
    hess = restricted_hessian(fam, np.zeros(3), 1)
    assert hess.hessian.shape == (1, 1)
    assert hess.hessian[0, 0] == pytest.approx(-1.0, abs=1e-4)
    assert (hess.mu, hess.nondegenerate) == (1, True)
    # At x3 = pi the group mean cos(x3) is minimal.
    hess = restricted_hessian(fam, [0.0, 0.0, np.pi], 1)
    assert hess.hessian[0, 0] == pytest.approx(1.0, abs=1e-4)
    assert hess.mu == 0


def test_restricted_hessian_on_ring():
    fam = builtin("nodal-ring-t3")
    hess = restricted_hessian(fam, ring_point(0.0), 2)
    assert hess.hessian[0, 0] == pytest.approx(-1.0 / (1.0 + EPS**2), abs=1e-4)


def test_isolated_stratum_chart():
    chart = stratum_chart(builtin("cone-symmetric"), [0.0, 0.0], 1)
    assert chart.tangent_dim == 0
    assert (chart.mu, chart.nondegenerate) == (0, True)
    assert chart.kernel_angle == 0.0
    assert chart.value == pytest.approx(0.0)


def test_locate_critical_point_on_ring():
    fam = builtin("nodal-ring-t3")
    proj = locate_stratum_critical(fam, [0.05, 0.02, 0.3], 1)
    assert np.allclose(proj.x, 0.0, atol=1e-6)
    assert proj.mean == pytest.approx(1.0)
    chart = stratum_chart(fam, [0.05, 0.02, 0.3], 1, locate=True)
    assert chart.tangent_dim == 1 and chart.mu == 1


@pytest.mark.parametrize("name,k", [("nodal-ring-t3", 1), ("nodal-line-t3", 2)])
def test_projection_is_idempotent(name: str, k: int):
    fam = builtin(name)
    rng = np.random.default_rng(37)
    for t in np.linspace(-2.5, 2.5, 11):
        start = ring_point(t) if name == "nodal-ring-t3" else np.array([0.0, 0.0, t])
        start = start + np.append(rng.uniform(-0.03, 0.03, size=2), 0.0)
        proj = project_to_stratum(fam, start, k)
        assert proj.iterations >= 1
        for again in (
            project_to_stratum(fam, proj.x, k),
            project_to_stratum(fam, proj.x, k, ref=proj.ref),
        ):
            assert np.linalg.norm(again.x - proj.x) <= 1e-8
            assert again.residual_norm <= max(proj.residual_norm, 1e-10)


def test_trace_nodal_ring():
    fam = builtin("nodal-ring-t3")
    coarse = trace_stratum(fam, ring_point(0.0), 1, step=0.05)
    fine = trace_stratum(fam, ring_point(0.0), 1, step=0.025)
    for trace in (coarse, fine):
        assert trace.stop is TraceStop.closed
        assert trace.closed
        assert trace.length() == pytest.approx(2 * np.pi, rel=0.01)
        assert not trace.flagged_segments
    for p in coarse.points:
        assert abs(p[0] - EPS * np.sin(p[2])) <= 1e-8
        assert abs(p[1]) <= 1e-8
    # Midpoint deviation shrinks at least linearly with the step.
    assert ring_deviation(fine.points) <= 0.55 * ring_deviation(coarse.points)

    csv_text = polyline_csv(coarse)
    lines = csv_text.splitlines()
    assert lines[0] == "x1,x2,x3"
    assert len(lines) == len(coarse.points) + 1


def test_trace_nodal_line_length():
    trace = trace_stratum(builtin("nodal-line-t3"), np.zeros(3), 2, step=0.1)
    assert trace.closed
    assert trace.length() == pytest.approx(2 * np.pi, rel=1e-3)


def test_trace_rejections():
    with pytest.raises(DomainError):
        trace_stratum(builtin("weyl-t3"), np.zeros(3), 1)
    with pytest.raises(ValueError):
        trace_stratum(builtin("nodal-line-t3"), np.zeros(3), 1, step=0.0)
    trace = trace_stratum(builtin("nodal-line-t3"), np.zeros(3), 1, step=0.1, max_steps=5)
    assert trace.stop is TraceStop.max_steps
    assert len(trace.points) == 6
