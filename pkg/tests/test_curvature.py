import numpy as np
import pytest

from ttdlra.dense import DenseTensor, matricize
from ttdlra.manifold import make_point, point_to_dense
from ttdlra.sampling import perturbed_point, random_orthonormal, random_point
from ttdlra.tangent import (
    TangentBasis,
    apply_tangent_projector,
    curvature_report,
    operator_norm_power,
)


def dense_projector(p):
    b = TangentBasis(p).ambient_matrix()
    return b @ b.T


def matrix_pair(rng, n=5, k=2):
    x = random_point(rng, (n, n), (k, k), tt_ranks=(k,))
    y = random_point(rng, (n, n), (k, k), tt_ranks=(k,))
    return x, y


def test_identical_points_report_zero(rng):
    x, _ = matrix_pair(rng)
    rep = curvature_report(x, x, rng=np.random.default_rng(1))
    assert rep.distance <= 1e-14
    assert rep.projector_difference_norm <= 1e-10
    assert rep.normal_defect <= 1e-14


def test_power_iteration_well_separated_spectrum():
    d = np.diag([3.0, -1.0, 0.5, 0.1])
    est = operator_norm_power(lambda v: d @ v, 4, rng=np.random.default_rng(3))
    np.testing.assert_allclose(est, 3.0, rtol=1e-7)


def test_power_iteration_matches_dense_norm(rng):
    # clustered extreme eigenvalues are common for projector differences, so
    # the capped iteration may stall slightly below the true norm; it never
    # overshoots, which is the safe direction for the bound checks
    for _ in range(5):
        x, y = matrix_pair(rng)
        d = dense_projector(x) - dense_projector(y)
        exact = np.linalg.norm(d, 2)
        est = operator_norm_power(lambda v: d @ v, d.shape[0], rng=np.random.default_rng(3))
        assert est <= exact * (1 + 1e-8)
        assert est >= exact * (1 - 1e-2)


def test_matrix_pair_with_known_smallest_singular_value(rng):
    # rank-one 2x2 pair: sigma equals the single singular value, bounds hold
    u1, v1 = random_orthonormal(rng, 2, 1), random_orthonormal(rng, 2, 1)
    u2, v2 = random_orthonormal(rng, 2, 1), random_orthonormal(rng, 2, 1)
    c1 = DenseTensor.from_array(np.array([[1.3]]))
    c2 = DenseTensor.from_array(np.array([[0.8]]))
    x = make_point(c1, (u1, v1))
    y = make_point(c2, (u2, v2))
    rep = curvature_report(x, y, rng=np.random.default_rng(5))
    assert rep.sigma_kind == "exact-matrix-distance"
    np.testing.assert_allclose(rep.sigma_used, 1.3, atol=1e-12)
    # dense oracle for the projector difference
    d = dense_projector(x) - dense_projector(y)
    np.testing.assert_allclose(
        rep.projector_difference_norm, np.linalg.norm(d, 2), rtol=1e-5
    )
    assert rep.projector_difference_norm <= rep.projector_bound_tt + 1e-10
    assert rep.normal_defect <= rep.normal_bound_tt + 1e-10


def test_matrix_case_bounds_hold_on_seeded_pairs(rng):
    for _ in range(25):
        x, y = matrix_pair(rng)
        rep = curvature_report(x, y, rng=np.random.default_rng(7))
        assert rep.ndim == 2
        # train-manifold bounds specialize to 8/sigma and 1/sigma for matrices
        np.testing.assert_allclose(
            rep.projector_bound_tt, 8.0 / rep.sigma_used * rep.distance, rtol=1e-12
        )
        np.testing.assert_allclose(
            rep.normal_bound_tt, rep.distance**2 / rep.sigma_used, rtol=1e-12
        )
        assert rep.projector_difference_norm <= rep.projector_bound_tt + 1e-10
        assert rep.normal_defect <= rep.normal_bound_tt + 1e-10
        # the outer-manifold bounds are looser, so they hold as well
        assert rep.projector_difference_norm <= rep.projector_bound_outer + 1e-10
        assert rep.normal_defect <= rep.normal_bound_outer + 1e-10


def test_second_order_normal_defect_under_retracted_perturbations(rng):
    x = random_point(rng, (4, 4, 4), (2, 3, 2), tt_ranks=(2, 2), min_gap_rel=0.05)
    direction = None
    ratios = {}
    for eps in (1e-1, 1e-2, 1e-3):
        y, direction = perturbed_point(rng, x, eps, direction)
        rep = curvature_report(x, y, rng=np.random.default_rng(11))
        assert rep.sigma_kind == "interface-gap-heuristic"
        ratios[eps] = rep.normal_defect / eps**2
    # quadratic smallness: defect/eps^2 stays within a constant factor
    assert ratios[1e-2] <= 4 * max(ratios[1e-1], 1e-12) + 1e-9
    assert ratios[1e-3] <= 4 * max(ratios[1e-2], 1e-12) + 1e-9


def test_report_serializes_flat(rng):
    x, y = matrix_pair(rng)
    rep = curvature_report(x, y, rng=np.random.default_rng(13))
    rec = rep.to_json_dict()
    assert set(rec) == {
        "ndim",
        "distance",
        "projector_difference_norm",
        "normal_defect",
        "projector_bound_outer",
        "normal_bound_outer",
        "projector_bound_tt",
        "normal_bound_tt",
        "sigma_used",
        "sigma_kind",
    }
    assert all(np.isfinite(v) for k, v in rec.items() if k != "sigma_kind")
