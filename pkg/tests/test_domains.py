import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncmetric.domains import (
    BallKernel,
    ComposedBallKernel,
    ComposedHalfPlaneKernel,
    HalfPlaneKernel,
    KernelDomain,
    NilpotentCone,
    NormBound,
    PointOutsideDomain,
    SpectralDisk,
    ball_domain,
    contains,
    domain_from_json,
    domain_to_json,
    gram,
    halfplane_domain,
    kernel_diffs,
    kernel_eval,
    kernel_from_json,
    kernel_to_json,
    require_inside,
)
from ncmetric.ncfunc import MoebiusBall, Polynomial, delta_f, eval_point
from ncmetric.ncpoint import DimMismatch, direction, point


def _rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


def _cmat(rng, rows, cols=None, scale=1.0):
    cols = rows if cols is None else cols
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return scale * g / np.sqrt(2)


def test_ball_kernel_at_origin_is_identity():
    z = point(np.zeros((2, 2)))
    np.testing.assert_allclose(kernel_eval(BallKernel(), z, z), np.eye(2))


def test_halfplane_kernel_at_i_is_one():
    a = point([[1j]])
    np.testing.assert_allclose(kernel_eval(HalfPlaneKernel(), a, a), [[1.0]])


def test_ball_kernel_scalar_half():
    a = point([[0.5]])
    np.testing.assert_allclose(kernel_eval(BallKernel(), a, a), [[0.75]])


def test_kernel_eval_rejects_bad_p_shape():
    a = point(np.zeros((2, 2)))
    with pytest.raises(DimMismatch):
        kernel_eval(BallKernel(), a, a, np.zeros((2, 3)))


def test_ball_membership_booleans():
    dom = ball_domain()
    assert contains(dom, point([[0.5]]))
    assert not contains(dom, point([[1.0]]))


def test_halfplane_membership_booleans():
    dom = halfplane_domain()
    assert contains(dom, point([[1j]]))
    assert not contains(dom, point([[-1j]]))


def test_scaled_ball_domain_rescales_membership():
    dom = ball_domain(2.0)
    assert contains(dom, point([[1.5]]))
    assert not contains(dom, point([[2.5]]))


def test_graded_disk_accepts_big_but_not_corner():
    # norm 3 clears the level-4 cap yet violates the level-2 cap
    dom = SpectralDisk(0.0, 1.0, NormBound("level", 1.0))
    big = np.zeros((4, 4))
    big[0, 2] = 3.0
    big[1, 3] = 0.5
    small = np.array([[0.0, 3.0], [0.0, 0.0]])
    assert contains(dom, point(big))
    assert not contains(dom, point(small))


def test_nilpotent_cone_membership():
    strict = np.array([[0.0, 2.0, 1.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]])
    assert contains(NilpotentCone(), point(strict))
    assert not contains(NilpotentCone(), point(np.eye(2)))


def test_membership_failure_carries_diagnostic():
    dom = KernelDomain(ComposedBallKernel(MoebiusBall(0.5)))
    mem = contains(dom, point([[2.0]]))
    assert not mem.inside
    assert "composing function failed" in mem.diagnostic


def test_require_inside_raises_outside():
    with pytest.raises(PointOutsideDomain):
        require_inside(ball_domain(), point([[1.2]]), name="src")


def _diff_setup(seed, na=2, mc=3):
    rng = _rng(seed)
    a = point(0.5 * _cmat(rng, na))
    c = point(0.5 * _cmat(rng, mc))
    b = direction(_cmat(rng, na, mc))
    return a, c, b


def test_ball_diffs_closed_form():
    a, c, b = _diff_setup(10)
    d0, d1, d01 = kernel_diffs(BallKernel(), a, c, b)
    cs = c.mat.conj().T
    bs = b.mat.conj().T
    np.testing.assert_allclose(d0, -b.mat @ cs, atol=1e-14)
    np.testing.assert_allclose(d1, -c.mat @ bs, atol=1e-14)
    np.testing.assert_allclose(d01, -b.mat @ bs, atol=1e-14)


def test_halfplane_diffs_closed_form():
    a, c, b = _diff_setup(11)
    d0, d1, d01 = kernel_diffs(HalfPlaneKernel(), a, c, b)
    np.testing.assert_allclose(d0, b.mat / 2.0j, atol=1e-14)
    np.testing.assert_allclose(d1, -b.mat.conj().T / 2.0j, atol=1e-14)
    np.testing.assert_allclose(d01, np.zeros((a.dim, a.dim)), atol=1e-14)


@pytest.mark.parametrize("half", [False, True])
def test_composed_diffs_reduce_to_difference_quotient(half):
    g = Polynomial((0.1, 0.8, 0.3))
    kernel = ComposedHalfPlaneKernel(g) if half else ComposedBallKernel(g)
    a, c, b = _diff_setup(12)
    d0, d1, d01 = kernel_diffs(kernel, a, c, b)
    dg = delta_f(g, a, c, b).mat
    gc = eval_point(g, c).mat
    if half:
        np.testing.assert_allclose(d0, dg / 2.0j, atol=1e-12)
        np.testing.assert_allclose(d1, -dg.conj().T / 2.0j, atol=1e-12)
        np.testing.assert_allclose(d01, np.zeros((a.dim, a.dim)), atol=1e-12)
    else:
        np.testing.assert_allclose(d0, -dg @ gc.conj().T, atol=1e-12)
        np.testing.assert_allclose(d1, -gc @ dg.conj().T, atol=1e-12)
        np.testing.assert_allclose(d01, -dg @ dg.conj().T, atol=1e-12)


def test_gram_respects_direct_sums():
    rng = _rng(13)
    a = point(0.6 * _cmat(rng, 2))
    c = point(0.6 * _cmat(rng, 3))
    both = np.zeros((5, 5), dtype=np.complex128)
    both[:2, :2] = a.mat
    both[2:, 2:] = c.mat
    g = gram(BallKernel(), point(both))
    np.testing.assert_allclose(g[:2, :2], gram(BallKernel(), a), atol=1e-14)
    np.testing.assert_allclose(g[2:, 2:], gram(BallKernel(), c), atol=1e-14)
    np.testing.assert_allclose(g[:2, 2:], np.zeros((2, 3)), atol=1e-14)


def test_kernel_json_round_trips():
    kernels = (
        BallKernel(),
        HalfPlaneKernel(),
        ComposedBallKernel(Polynomial((0.0, 2.0))),
        ComposedHalfPlaneKernel(MoebiusBall(0.25j)),
    )
    for k in kernels:
        assert kernel_from_json(kernel_to_json(k)) == k


def test_domain_json_round_trips():
    domains = (
        ball_domain(0.5),
        halfplane_domain(),
        SpectralDisk(0.3 - 0.1j, 1.5, NormBound("level", 2.0)),
        NilpotentCone(),
    )
    for d in domains:
        assert domain_from_json(domain_to_json(d)) == d


def test_domain_json_rejects_unknown_variant():
    with pytest.raises(ValueError):
        domain_from_json({"variant": "torus"})


def test_norm_bound_rules():
    assert NormBound("constant", 2.0).at_level(5) == 2.0
    assert NormBound("level", 1.5).at_level(4) == 6.0
    with pytest.raises(ValueError):
        NormBound("cubic", 1.0)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.floats(min_value=0.05, max_value=0.9),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_ball_membership_tracks_norm(n, target, seed):
    rng = _rng(seed)
    g = _cmat(rng, n)
    m = target * g / max(np.linalg.norm(g, 2), 1e-12)
    assert contains(ball_domain(), point(m))
    assert not contains(ball_domain(), point(m / target * 1.1))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=2**31 - 1))
def test_free_gram_block_matches_self_gram(n, seed):
    # bottom-left block of the derivative evaluation reproduces gram(c)
    rng = _rng(seed)
    a = point(0.5 * _cmat(rng, n))
    c = point(0.5 * _cmat(rng, n))
    b = direction(_cmat(rng, n))
    for kernel in (BallKernel(), HalfPlaneKernel()):
        d0, d1, d01 = kernel_diffs(kernel, a, c, b)
        assert d0.shape == (n, n) and d1.shape == (n, n) and d01.shape == (n, n)
