import math

import numpy as np
import pytest

from ncmetric.freeprob import (
    DensityResult,
    KrausAugment,
    MatrixModel,
    MaxIterExceeded,
    NotInHalfPlane,
    RangeViolation,
    ScalarLaw,
    ScalarPower,
    SingularResolvent,
    F_and_h,
    cauchy_G,
    convolved_G,
    density_grid,
    expectation,
    halfplane_gauge,
    k0_and_fixed_point,
    law_quadrature,
    make_h0,
    model_from_json,
    model_to_json,
    rho_from_json,
    rho_to_json,
    subordination_solve,
    support_interval,
    validate_rho,
)
from ncmetric.matcore import NonHermitianInput
from ncmetric.ncpoint import NcPoint, point

import oracles


def _rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


def _scalar(z):
    return point([[z]])


def test_semicircle_cauchy_frozen_value():
    g = cauchy_G(ScalarLaw("semicircle"), _scalar(2j))
    assert complex(g.mat[0, 0]) == pytest.approx(1j * (1.0 - math.sqrt(2.0)), abs=1e-12)


def test_bernoulli_cauchy_frozen_value():
    g = cauchy_G(ScalarLaw("bernoulli"), _scalar(3j))
    assert complex(g.mat[0, 0]) == pytest.approx(-0.3j, abs=1e-14)


def test_arcsine_cauchy_frozen_value():
    g = cauchy_G(ScalarLaw("arcsine"), _scalar(3j))
    assert complex(g.mat[0, 0]) == pytest.approx(-1j / math.sqrt(13.0), abs=1e-12)


def test_scalar_closed_forms_match_oracles():
    for z in (0.5 + 0.7j, -1.8 + 0.5j, 3.0 + 2.0j):
        got = complex(cauchy_G(ScalarLaw("semicircle"), _scalar(z)).mat[0, 0])
        assert got == pytest.approx(oracles.semicircle_G(z), abs=1e-12)
        got = complex(cauchy_G(ScalarLaw("arcsine"), _scalar(z)).mat[0, 0])
        assert got == pytest.approx(oracles.arcsine_G(z), abs=1e-12)


def test_quadrature_route_matches_closed_form():
    # level 2 diagonal forces the quadrature path
    law = ScalarLaw("semicircle")
    b = point(np.diag([2j, 0.4 + 1j]))
    g = cauchy_G(law, b)
    assert complex(g.mat[0, 0]) == pytest.approx(oracles.semicircle_G(2j), abs=1e-8)
    assert complex(g.mat[1, 1]) == pytest.approx(oracles.semicircle_G(0.4 + 1j), abs=1e-8)


def test_law_quadrature_weights_sum_to_one():
    for law in (ScalarLaw("semicircle", 2.0), ScalarLaw("arcsine"), ScalarLaw("bernoulli")):
        _, weights = law_quadrature(law)
        assert float(np.sum(weights)) == pytest.approx(1.0, abs=1e-13)


def test_scalar_law_validation():
    with pytest.raises(ValueError):
        ScalarLaw("uniform")
    with pytest.raises(ValueError):
        ScalarLaw("semicircle", variance=0.0)
    with pytest.raises(ValueError):
        ScalarPower(0.5)
    with pytest.raises(ValueError):
        KrausAugment(())


def test_cauchy_needs_halfplane():
    with pytest.raises(NotInHalfPlane):
        cauchy_G(ScalarLaw("semicircle"), _scalar(1.0))


def test_matrix_model_needs_hermitian():
    with pytest.raises(NonHermitianInput):
        MatrixModel(np.array([[0.0, 1.0], [0.0, 0.0]]), (1, 1))


def test_expectation_is_a_conditional_projection():
    rng = _rng(40)
    model = MatrixModel(np.diag([1.0, -1.0, 0.5, 0.5]), (2, 2))
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    em = expectation(model, m)
    np.testing.assert_allclose(expectation(model, em), em, atol=1e-14)
    np.testing.assert_allclose(expectation(model, np.eye(4)), np.eye(4), atol=1e-14)
    np.testing.assert_allclose(
        expectation(model, m.conj().T), expectation(model, m).conj().T, atol=1e-14
    )


def test_matrix_cauchy_has_negative_imag():
    rng = _rng(41)
    w = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    model = MatrixModel((w + w.conj().T) / 2, (1, 2))
    for _ in range(5):
        h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = (h + h.conj().T) / 2
        p = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = NcPoint(3, 1, h + 1j * (p @ p.conj().T / 3 + 0.4 * np.eye(3)))
        g = cauchy_G(model, b)
        im = (g.mat - g.mat.conj().T) / 2j
        assert float(np.linalg.eigvalsh(im)[-1]) < 0.0


def test_imh_guard_names_the_block_algebra():
    # dense b couples the blocks, so b leaves the half-plane of the
    # block-scalar algebra and Im h legitimately dips negative
    model = MatrixModel(np.array([[0.0, 1.0], [1.0, 0.0]]), (1, 1))
    b = NcPoint(2, 1, np.array([[0.2 + 1j, 0.9j], [0.9j, -0.3 + 1j]]))
    with pytest.raises(SingularResolvent, match="block algebra"):
        F_and_h(model, b)


def test_validate_rho_rejects_dense_kraus_factor():
    model = MatrixModel(np.diag([1.0, -1.0]), (1, 1))
    dense = np.array([[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(ValueError):
        validate_rho(model, KrausAugment((dense,)))
    validate_rho(model, KrausAugment((np.diag([0.3, 0.7]),)))


def test_bernoulli_power_two_subordination_frozen():
    omega, trace = subordination_solve(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(3j))
    assert trace.converged
    want = oracles.bernoulli_power2_omega(3j)
    assert complex(omega.mat[0, 0]) == pytest.approx(want, abs=1e-8)
    assert complex(omega.mat[0, 0]) == pytest.approx(1j * (3.0 + math.sqrt(13.0)) / 2.0, abs=1e-8)


def test_bernoulli_power_two_matches_arcsine():
    for z in (3j, 0.7 + 0.9j, -1.1 + 0.6j):
        got = convolved_G(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(z))
        assert complex(got.mat[0, 0]) == pytest.approx(oracles.arcsine_G(z), abs=1e-8)


def test_semicircle_power_adds_variance():
    got = convolved_G(ScalarLaw("semicircle"), ScalarPower(4.0), _scalar(5j))
    assert complex(got.mat[0, 0]) == pytest.approx(1j * (5.0 - math.sqrt(41.0)) / 8.0, abs=1e-8)


def test_solver_certificate_fields():
    _, trace = subordination_solve(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(3j))
    assert trace.epsilon0 == pytest.approx(3.0, abs=1e-9)
    assert trace.contraction_bound is not None and 0.0 < trace.contraction_bound < 1.0
    assert trace.certificate_ok
    if trace.tail_ratio is not None:
        assert trace.tail_ratio <= trace.contraction_bound + 0.05
    assert trace.omega_im_min > trace.epsilon0 - 1e-9


def test_maxiter_carries_best_iterate():
    with pytest.raises(MaxIterExceeded) as exc:
        subordination_solve(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(0.1 + 0.05j), max_iter=1)
    err = exc.value
    assert isinstance(err.omega, NcPoint)
    assert err.trace.iterations == 1
    assert not err.trace.converged


def test_density_grid_recovers_arcsine_support():
    res = density_grid(
        ScalarLaw("bernoulli"), ScalarPower(2.0), -2.6, 2.6, points=101, eps=3e-3
    )
    assert isinstance(res, DensityResult)
    assert all(r.converged for r in res.rows)
    lo, hi = support_interval(res, threshold=0.012)
    assert lo == pytest.approx(-2.0, abs=0.1)
    assert hi == pytest.approx(2.0, abs=0.1)
    assert res.mass > 0.9


def test_gauge_frozen_value_and_axioms():
    assert halfplane_gauge(_scalar(2j), _scalar(1j)) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert halfplane_gauge(_scalar(2j), _scalar(2j)) == 0.0
    with pytest.raises(NotInHalfPlane):
        halfplane_gauge(_scalar(1.0), _scalar(1j))


def test_fixed_point_frozen_value():
    h0 = make_h0(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(2j))
    assert h0.eps0 == pytest.approx(2.0)
    res = k0_and_fixed_point(h0, _scalar(1j))
    want = oracles.bernoulli_t2_fixed_point(1j, 2j)
    assert complex(res.x.mat[0, 0]) == pytest.approx(want, abs=1e-8)
    assert complex(res.x.mat[0, 0]) == pytest.approx(1j * (math.sqrt(13.0) - 1.0) / 2.0, abs=1e-8)
    assert res.k0_radius < 1.0 / (2.0 * h0.eps0) + 1e-9


def test_fixed_point_boundary_start():
    from ncmetric.matcore import inverse

    h0 = make_h0(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(2j))
    with pytest.raises(NotInHalfPlane):
        k0_and_fixed_point(h0, _scalar(0.5))
    res = k0_and_fixed_point(h0, _scalar(0.5), allow_boundary=True)
    x = res.x
    assert float(np.imag(x.mat[0, 0])) > 0.0
    inner = NcPoint(1, 1, -inverse(x.mat))
    recompute = 0.5 - inverse(h0(inner).mat)
    np.testing.assert_allclose(x.mat, recompute, atol=1e-8)


def test_overestimated_eps0_is_caught():
    h0 = make_h0(ScalarLaw("bernoulli"), ScalarPower(2.0), _scalar(2j))
    with pytest.raises(RangeViolation):
        k0_and_fixed_point(h0, _scalar(1j), eps0=50.0)


def test_model_json_round_trips():
    models = (
        MatrixModel(np.array([[0.0, 1.0], [1.0, 0.0]]), (1, 1)),
        ScalarLaw("semicircle", 2.0),
        ScalarLaw("point_mass", atom=1.5),
    )
    for m in models:
        back = model_from_json(model_to_json(m))
        if isinstance(m, MatrixModel):
            np.testing.assert_array_equal(back.x, m.x)
            assert back.blocks == m.blocks
        else:
            assert back == m


def test_rho_json_round_trips():
    back = rho_from_json(rho_to_json(ScalarPower(3.0)))
    assert back == ScalarPower(3.0)
    kr = KrausAugment((np.diag([0.5, 0.5]), np.diag([0.1, 0.9])))
    back = rho_from_json(rho_to_json(kr))
    assert len(back.vs) == 2
    np.testing.assert_array_equal(back.vs[0], kr.vs[0])
