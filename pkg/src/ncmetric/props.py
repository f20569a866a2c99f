"""Cross-module invariant suite.

Each check draws its own samples from a named Philox substream of the
run seed, computes a scalar "worst" defect, and passes when that
defect is at most its tolerance. The suite is what `ncmetric props`
runs; with a fixed seed the report is byte-identical across runs and
thread counts, because the substreams are independent of scheduling.

Count-valued checks (membership agreement and the like) report the
number of offending samples as the defect.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .domains import (
    BallKernel,
    ComposedBallKernel,
    ComposedHalfPlaneKernel,
    HalfPlaneKernel,
    KernelDomain,
    NormBound,
    SpectralDisk,
    ball_domain,
    contains,
    gram,
    halfplane_domain,
    kernel_eval,
)
from .freeprob import (
    KrausAugment,
    MatrixModel,
    ScalarLaw,
    ScalarPower,
    cauchy_G,
    expectation,
    F_and_h,
    halfplane_gauge,
    k0_and_fixed_point,
    make_h0,
    subordination_solve,
)
from .matcore import (
    herm_eig,
    herm_part,
    imag_part,
    inverse,
    operator_norm,
    psd_inv_sqrt,
)
from .metric import (
    check_contraction,
    compare_nested,
    d_upper,
    delta_closed,
    delta_kernel,
    delta_ray,
    delta_auto_tilde,
    delta_tilde,
    dtilde_upper,
)
from .ncfunc import Composition, MoebiusBall, Polynomial, ScalarCalculus, check_axioms, eval_point
from .ncpoint import (
    NcDirection,
    NcPoint,
    amplify,
    block_upper,
    direct_sum,
    point,
    unitary_conjugate,
)
from .sampling import (
    ball_point,
    complex_matrix,
    direction_sample,
    halfplane_point,
    hermitian_matrix,
    rng_stream,
    selfadjoint_disk_point,
    unitary_matrix,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    worst: float
    tol: float
    passed: bool


def _result(name: str, samples: int, worst: float, tol: float) -> CheckResult:
    worst = float(worst)
    return CheckResult(name, samples, worst, float(tol), bool(worst <= tol))


def _rand_levels(rng) -> tuple[int, int]:
    return int(rng.integers(1, 3)), int(rng.integers(1, 3))


# ---------------------------------------------------------------- matcore


def check_eig_reconstruction(seed: int) -> CheckResult:
    rng = rng_stream(seed, "eig_reconstruction")
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        a = hermitian_matrix(rng, n, scale=2.0)
        w, v = herm_eig(a)
        scale = max(1.0, operator_norm(a))
        worst = max(
            worst,
            operator_norm(v @ np.diag(w) @ v.conj().T - a) / scale,
            operator_norm(v.conj().T @ v - np.eye(n)),
        )
    return _result("eig_reconstruction", 20, worst, 1e-10)


def check_norm_unitary_invariance(seed: int) -> CheckResult:
    rng = rng_stream(seed, "norm_unitary_invariance")
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        a = complex_matrix(rng, n, n, scale=3.0)
        u, v = unitary_matrix(rng, n), unitary_matrix(rng, n)
        worst = max(worst, abs(operator_norm(u @ a @ v) - operator_norm(a)) / max(1.0, operator_norm(a)))
    return _result("norm_unitary_invariance", 20, worst, 1e-10)


def check_psd_inv_sqrt(seed: int) -> CheckResult:
    rng = rng_stream(seed, "psd_inv_sqrt")
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        w = complex_matrix(rng, n, n)
        a = w @ w.conj().T / n + 0.1 * np.eye(n)
        s = psd_inv_sqrt(a)
        worst = max(worst, operator_norm(s @ a @ s - np.eye(n)))
    return _result("psd_inv_sqrt", 20, worst, 1e-8)


# ---------------------------------------------------------------- ncpoint


def check_direct_sum_assoc(seed: int) -> CheckResult:
    rng = rng_stream(seed, "direct_sum_assoc")
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(1, 3))
        ps = [ball_point(rng, int(rng.integers(1, 3)), d) for _ in range(3)]
        left = direct_sum(direct_sum(ps[0], ps[1]), ps[2])
        right = direct_sum(ps[0], direct_sum(ps[1], ps[2]))
        worst = max(worst, float(np.max(np.abs(left.mat - right.mat))))
    return _result("direct_sum_assoc", 10, worst, 0.0)


def check_amplify_product(seed: int) -> CheckResult:
    rng = rng_stream(seed, "amplify_product")
    worst = 0.0
    for _ in range(10):
        d, lvl, k = int(rng.integers(1, 3)), int(rng.integers(1, 3)), int(rng.integers(2, 4))
        a = ball_point(rng, lvl, d)
        c = ball_point(rng, lvl, d)
        z1, z2 = complex_matrix(rng, k, k), complex_matrix(rng, k, k)
        lhs = amplify(z1, a).mat @ amplify(z2, c).mat
        rhs = np.kron(z1 @ z2, a.mat @ c.mat)
        worst = max(worst, operator_norm(lhs - rhs) / max(1.0, operator_norm(rhs)))
    return _result("amplify_product", 10, worst, 1e-12)


def check_unitary_conj_spectrum(seed: int) -> CheckResult:
    rng = rng_stream(seed, "unitary_conj_spectrum")
    worst = 0.0
    for _ in range(15):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        h = NcPoint(d, lvl, hermitian_matrix(rng, lvl * d, scale=2.0))
        u = unitary_matrix(rng, lvl)
        before = np.linalg.eigvalsh(h.mat)
        after = np.linalg.eigvalsh(unitary_conjugate(u, h).mat)
        worst = max(worst, float(np.max(np.abs(before - after))))
    return _result("unitary_conj_spectrum", 15, worst, 1e-9)


# ---------------------------------------------------------------- ncfunc


_FDC_FUNCS = (
    Polynomial((0.3, 0.5, 0.0, 0.25)),
    MoebiusBall(0.3 + 0.1j),
    Composition((Polynomial((0.0, 0.5, 0.2)), MoebiusBall(-0.2j))),
)


def check_fdc_identity(seed: int) -> CheckResult:
    # corner of f on the block point must reproduce f(a) - f(c) at b = a - c
    rng = rng_stream(seed, "fdc_identity")
    worst = 0.0
    n = 0
    for f in _FDC_FUNCS:
        for _ in range(6):
            d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            a = ball_point(rng, lvl, d, fill=0.6)
            c = ball_point(rng, lvl, d, fill=0.6)
            b = NcDirection(d, lvl, lvl, a.mat - c.mat)
            big = eval_point(f, block_upper(a, b, c))
            corner = big.mat[: a.dim, a.dim :]
            diff = eval_point(f, a).mat - eval_point(f, c).mat
            worst = max(worst, operator_norm(corner - diff) / max(1.0, operator_norm(diff)))
            n += 1
    return _result("fdc_identity", n, worst, 1e-9)


def check_function_axioms(seed: int) -> CheckResult:
    rng = rng_stream(seed, "function_axioms")
    exp_like = ScalarCalculus(tuple(1.0 / math.factorial(k) for k in range(12)), radius=6.0)
    worst = 0.0
    n = 0
    for f in (Polynomial((0.1, 0.7, 0.0, 0.2)), exp_like, _FDC_FUNCS[2]):
        pts = [ball_point(rng, int(rng.integers(1, 3)), 1, fill=0.6) for _ in range(4)]
        rep = check_axioms(f, pts, rng=rng)
        worst = max(worst, rep["direct_sum_max"], rep["swap_max"], rep["intertwining_max"])
        n += len(pts)
    return _result("function_axioms", n, worst, 1e-8)


def check_moebius_ball_image(seed: int) -> CheckResult:
    rng = rng_stream(seed, "moebius_ball_image")
    worst = -1.0
    for _ in range(20):
        alpha = 0.85 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        f = MoebiusBall(complex(alpha))
        a = ball_point(rng, int(rng.integers(1, 4)), 1, fill=0.85)
        worst = max(worst, operator_norm(eval_point(f, a).mat) - 1.0)
    return _result("moebius_ball_image", 20, worst, 0.0)


# ---------------------------------------------------------------- domains


def _prop_kernels():
    return (
        BallKernel(),
        HalfPlaneKernel(),
        ComposedBallKernel(Polynomial((0.0, 2.0))),
        ComposedHalfPlaneKernel(Polynomial((0.2j, 1.0))),
    )


def _kernel_sample(kernel, rng, lvl: int, d: int) -> NcPoint:
    if isinstance(kernel, (HalfPlaneKernel, ComposedHalfPlaneKernel)):
        return halfplane_point(rng, lvl, d)
    if isinstance(kernel, ComposedBallKernel):
        return ball_point(rng, lvl, d, radius=0.5, fill=0.7)
    return ball_point(rng, lvl, d)


def check_kernel_direct_sum_blocks(seed: int) -> CheckResult:
    rng = rng_stream(seed, "kernel_direct_sum_blocks")
    worst = 0.0
    n = 0
    for kernel in _prop_kernels():
        for _ in range(5):
            d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            a1 = _kernel_sample(kernel, rng, lvl, d)
            a2 = _kernel_sample(kernel, rng, lvl, d)
            q = gram(kernel, direct_sum(a1, a2))
            blocks = np.zeros_like(q)
            blocks[: a1.dim, : a1.dim] = gram(kernel, a1)
            blocks[a1.dim :, a1.dim :] = gram(kernel, a2)
            worst = max(worst, operator_norm(q - blocks) / max(1.0, operator_norm(q)))
            n += 1
    return _result("kernel_direct_sum_blocks", n, worst, 1e-12)


def check_kernel_unitary_intertwine(seed: int) -> CheckResult:
    rng = rng_stream(seed, "kernel_unitary_intertwine")
    worst = 0.0
    n = 0
    for kernel in _prop_kernels():
        for _ in range(5):
            d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            a = _kernel_sample(kernel, rng, lvl, d)
            c = _kernel_sample(kernel, rng, lvl, d)
            p = complex_matrix(rng, a.dim, c.dim)
            u = unitary_matrix(rng, lvl)
            v = unitary_matrix(rng, lvl)
            ua, vc = unitary_conjugate(u, a), unitary_conjugate(v, c)
            uk = np.kron(u, np.eye(d))
            vk = np.kron(v, np.eye(d))
            lhs = kernel_eval(kernel, ua, vc, uk @ p @ vk.conj().T)
            rhs = uk @ kernel_eval(kernel, a, c, p) @ vk.conj().T
            worst = max(worst, operator_norm(lhs - rhs) / max(1.0, operator_norm(rhs)))
            n += 1
    return _result("kernel_unitary_intertwine", n, worst, 1e-10)


def check_ball_membership_norm(seed: int) -> CheckResult:
    rng = rng_stream(seed, "ball_membership_norm")
    dom = ball_domain()
    bad = 0
    for _ in range(30):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        g = complex_matrix(rng, lvl * d, lvl * d)
        target = float(rng.uniform(0.3, 1.3))
        if abs(target - 1.0) < 1e-6:
            continue
        p = NcPoint(d, lvl, g * (target / operator_norm(g)))
        if contains(dom, p).inside != (target < 1.0):
            bad += 1
    return _result("ball_membership_norm", 30, float(bad), 0.0)


def check_halfplane_membership(seed: int) -> CheckResult:
    rng = rng_stream(seed, "halfplane_membership")
    dom = halfplane_domain()
    bad = 0
    for _ in range(20):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        p = halfplane_point(rng, lvl, d)
        flipped = NcPoint(d, lvl, p.mat.conj().T)
        bad += int(not contains(dom, p).inside)
        bad += int(contains(dom, flipped).inside)
    return _result("halfplane_membership", 40, float(bad), 0.0)


# ---------------------------------------------------------------- metric


def _oracle_triples(rng, kind: str, count: int):
    out = []
    for _ in range(count):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        if kind == "ball":
            a = ball_point(rng, lvl, d)
            c = ball_point(rng, lvl, d)
        else:
            a = halfplane_point(rng, lvl, d)
            c = halfplane_point(rng, lvl, d)
        out.append((a, c, direction_sample(rng, d, lvl, lvl)))
    return out


def _oracle_worst(kind: str, triples) -> float:
    dom = ball_domain() if kind == "ball" else halfplane_domain()
    kernel = BallKernel() if kind == "ball" else HalfPlaneKernel()
    worst = 0.0
    for a, c, b in triples:
        ray = delta_ray(dom, a, c, b, tol=1e-7).value
        closed = delta_closed(kind, a, c, b).value
        kern = delta_kernel(kernel, a, c, b).value
        worst = max(worst, abs(ray - closed), abs(ray - kern))
    return worst


def check_oracle_ball(seed: int) -> CheckResult:
    rng = rng_stream(seed, "oracle_ball")
    worst = _oracle_worst("ball", _oracle_triples(rng, "ball", 12))
    return _result("oracle_ball", 12, worst, 5e-6)


def check_oracle_halfplane(seed: int) -> CheckResult:
    rng = rng_stream(seed, "oracle_halfplane")
    worst = _oracle_worst("halfplane", _oracle_triples(rng, "halfplane", 12))
    return _result("oracle_halfplane", 12, worst, 5e-6)


def check_delta_homogeneity(seed: int) -> CheckResult:
    rng = rng_stream(seed, "delta_homogeneity")
    kernel = ComposedBallKernel(Polynomial((0.0, 2.0)))
    worst = 0.0
    n = 0
    for _ in range(10):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a = ball_point(rng, lvl, d, radius=0.5, fill=0.7)
        c = ball_point(rng, lvl, d, radius=0.5, fill=0.7)
        b = direction_sample(rng, d, lvl, lvl)
        base = delta_kernel(kernel, a, c, b).value
        for s in (0.5, 2.0):
            sb = NcDirection(d, lvl, lvl, s * b.mat)
            worst = max(worst, abs(delta_kernel(kernel, a, c, sb).value - s * base) / max(1e-12, s * base))
            n += 1
    return _result("delta_homogeneity", n, worst, 1e-9)


def check_delta_unitary_invariance(seed: int) -> CheckResult:
    rng = rng_stream(seed, "delta_unitary_invariance")
    worst = 0.0
    n = 0
    for kind in ("ball", "halfplane"):
        for _ in range(8):
            d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            if kind == "ball":
                a, c = ball_point(rng, lvl, d), ball_point(rng, lvl, d)
            else:
                a, c = halfplane_point(rng, lvl, d), halfplane_point(rng, lvl, d)
            b = direction_sample(rng, d, lvl, lvl)
            u, v = unitary_matrix(rng, lvl), unitary_matrix(rng, lvl)
            uk, vk = np.kron(u, np.eye(d)), np.kron(v, np.eye(d))
            before = delta_closed(kind, a, c, b).value
            after = delta_closed(
                kind,
                unitary_conjugate(u, a),
                unitary_conjugate(v, c),
                NcDirection(d, lvl, lvl, uk @ b.mat @ vk.conj().T),
            ).value
            worst = max(worst, abs(before - after))
            n += 1
    return _result("delta_unitary_invariance", n, worst, 1e-8)


def check_delta_direct_sum_max(seed: int) -> CheckResult:
    rng = rng_stream(seed, "delta_direct_sum_max")
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(1, 3))
        lvl = int(rng.integers(1, 3))
        pairs = [(ball_point(rng, lvl, d), ball_point(rng, lvl, d)) for _ in range(2)]
        big_a = direct_sum(pairs[0][0], pairs[1][0])
        big_c = direct_sum(pairs[0][1], pairs[1][1])
        parts = [delta_tilde("ball", a, c).value for a, c in pairs]
        whole = delta_tilde("ball", big_a, big_c).value
        worst = max(worst, abs(whole - max(parts)))
    return _result("delta_direct_sum_max", 10, worst, 1e-8)


def check_delta_amplification(seed: int) -> CheckResult:
    rng = rng_stream(seed, "delta_amplification")
    worst = 0.0
    n = 0
    for _ in range(8):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a, c = ball_point(rng, lvl, d), ball_point(rng, lvl, d)
        b = direction_sample(rng, d, lvl, lvl)
        base = delta_closed("ball", a, c, b).value
        for k in (2, 3):
            z = complex_matrix(rng, k, k)
            big_b = NcDirection(d, k * lvl, k * lvl, np.kron(z, b.mat))
            val = delta_closed(
                "ball", amplify(np.eye(k), a), amplify(np.eye(k), c), big_b
            ).value
            worst = max(worst, abs(val - operator_norm(z) * base))
            n += 1
    return _result("delta_amplification", n, worst, 1e-8)


def check_delta_nondegeneracy(seed: int) -> CheckResult:
    rng = rng_stream(seed, "delta_nondegeneracy")
    min_val = float("inf")
    for _ in range(15):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a = ball_point(rng, lvl, d)
        b = direction_sample(rng, d, lvl, lvl)
        min_val = min(min_val, delta_closed("ball", a, a, b).value)
    return _result("delta_nondegeneracy", 15, 1e-9 - min_val, 0.0)


def check_tilde_matches_delta(seed: int) -> CheckResult:
    rng = rng_stream(seed, "tilde_matches_delta")
    worst = 0.0
    n = 0
    for kind in ("ball", "halfplane"):
        for _ in range(8):
            d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            if kind == "ball":
                a, c = ball_point(rng, lvl, d), ball_point(rng, lvl, d)
            else:
                a, c = halfplane_point(rng, lvl, d), halfplane_point(rng, lvl, d)
            b = NcDirection(d, lvl, lvl, a.mat - c.mat)
            worst = max(worst, abs(delta_tilde(kind, a, c).value - delta_closed(kind, a, c, b).value))
            n += 1
    return _result("tilde_matches_delta", n, worst, 1e-8)


def check_ordering_chain(seed: int) -> CheckResult:
    dom = ball_domain()
    worst = 0.0
    for r in (0.3, 0.45):
        a = point(np.zeros((1, 1)))
        c = point(np.array([[r]]))
        bound = dtilde_upper(dom, a, c, refinement_budget=4, perturb_evals=30)
        stages = [s for s in bound.stage_values if np.isfinite(s)]
        for earlier, later in zip(stages, stages[1:]):
            worst = max(worst, later - earlier - 1e-9)
        path = d_upper(dom, a, c, quad_points=128)
        worst = max(worst, bound.value - path.value - 1e-4)
    return _result("ordering_chain", 2, worst, 1e-9)


def check_norm_lower_bound(seed: int) -> CheckResult:
    rng = rng_stream(seed, "norm_lower_bound")
    worst = 0.0
    for _ in range(20):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a, c = ball_point(rng, lvl, d), ball_point(rng, lvl, d)
        worst = max(worst, operator_norm(a.mat - c.mat) - delta_tilde("ball", a, c).value)
    return _result("norm_lower_bound", 20, worst, 1e-9)


def check_upper_semicontinuity(seed: int) -> CheckResult:
    rng = rng_stream(seed, "upper_semicontinuity")
    worst = -float("inf")
    for _ in range(5):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a = ball_point(rng, lvl, d, fill=0.6)
        c = ball_point(rng, lvl, d, fill=0.6)
        b = direction_sample(rng, d, lvl, lvl)
        e = complex_matrix(rng, lvl * d, lvl * d)
        e *= 0.1 / operator_norm(e)
        base = delta_closed("ball", a, c, b).value
        ak = NcPoint(d, lvl, a.mat + (2.0 ** -8) * e)
        worst = max(worst, delta_closed("ball", ak, c, b).value - base)
    return _result("upper_semicontinuity", 5, worst, 1e-3)


def check_boundary_blowup(seed: int) -> CheckResult:
    vals = []
    zero = point(np.zeros((1, 1)))
    for j in range(4, 11):
        r = 1.0 - 2.0 ** -j
        vals.append(delta_tilde("ball", zero, point(np.array([[r]]))).value)
    worst = max(earlier - later for earlier, later in zip(vals, vals[1:]))
    worst = max(worst, 10.0 - vals[-1])
    return _result("boundary_blowup", len(vals), worst, 0.0)


def check_spectral_disk_bounded(seed: int) -> CheckResult:
    # delta~ stays below 4/3 on the self-adjoint slice even though the
    # points approach the boundary of the spectral disk
    rng = rng_stream(seed, "spectral_disk_bounded")
    dom = SpectralDisk(0.0, 0.25, NormBound("constant", 1.0))
    worst = -float("inf")
    for _ in range(25):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a = selfadjoint_disk_point(rng, lvl, d, 0.25)
        c = selfadjoint_disk_point(rng, lvl, d, 0.25)
        worst = max(worst, delta_auto_tilde(dom, a, c).value - 4.0 / 3.0)
    return _result("spectral_disk_bounded", 25, worst, 1e-9)


def check_nesting_halves(seed: int) -> CheckResult:
    rng = rng_stream(seed, "nesting_halves")
    inner, outer = ball_domain(0.5), ball_domain(1.0)
    pairs = []
    for _ in range(20):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        pairs.append(
            (ball_point(rng, lvl, d, radius=0.5, fill=0.9), ball_point(rng, lvl, d, radius=0.5, fill=0.9))
        )
    rep = compare_nested(inner, outer, big_m=0.5, small_m=0.5, pairs=pairs)
    return _result("nesting_halves", rep["samples"], -rep["min_margin"], 1e-8)


def check_moebius_isometry(seed: int) -> CheckResult:
    rng = rng_stream(seed, "moebius_isometry")
    dom = ball_domain()
    worst = 0.0
    n = 0
    for _ in range(4):
        alpha = 0.7 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        triples = _oracle_triples(rng, "ball", 3)
        rep = check_contraction(MoebiusBall(complex(alpha)), dom, dom, triples, equality=True, tol=1e-6)
        worst = max(worst, rep["worst_abs_gap"])
        n += rep["samples"]
    return _result("moebius_isometry", n, worst, 1e-6)


def check_polynomial_contraction(seed: int) -> CheckResult:
    rng = rng_stream(seed, "polynomial_contraction")
    dom = ball_domain()
    triples = _oracle_triples(rng, "ball", 12)
    rep = check_contraction(Polynomial((0.0, 0.0, 0.5)), dom, dom, triples, tol=1e-7)
    return _result("polynomial_contraction", rep["samples"], rep["worst_excess"], 1e-7)


# ---------------------------------------------------------------- freeprob


def _sample_model(rng) -> MatrixModel:
    x = hermitian_matrix(rng, 6, scale=1.0)
    return MatrixModel(x, (2, 2, 2))


def _block_scalar(rng, blocks, im_floor: float | None = None) -> np.ndarray:
    # an element of the diagonal block algebra B: one scalar per block
    parts = []
    for width in blocks:
        z = complex(rng.standard_normal(), rng.standard_normal())
        if im_floor is not None:
            z = complex(z.real, float(rng.uniform(im_floor, im_floor + 1.0)))
        parts.append(z * np.eye(width, dtype=np.complex128))
    out = np.zeros((sum(blocks), sum(blocks)), dtype=np.complex128)
    pos = 0
    for width, cell in zip(blocks, parts):
        out[pos : pos + width, pos : pos + width] = cell
        pos += width
    return out


def check_resolvent_negative_imag(seed: int) -> CheckResult:
    rng = rng_stream(seed, "resolvent_negative_imag")
    model = _sample_model(rng)
    worst = -float("inf")
    for _ in range(15):
        lvl = int(rng.integers(1, 3))
        b = halfplane_point(rng, lvl, 6)
        g = cauchy_G(model, b)
        worst = max(worst, float(np.linalg.eigvalsh(imag_part(g.mat))[-1]))
    return _result("resolvent_negative_imag", 15, worst, 0.0)


def check_expectation_axioms(seed: int) -> CheckResult:
    rng = rng_stream(seed, "expectation_axioms")
    model = _sample_model(rng)
    worst = 0.0
    for _ in range(10):
        lvl = int(rng.integers(1, 3))
        m = complex_matrix(rng, 6 * lvl, 6 * lvl, scale=2.0)
        em = expectation(model, m)
        worst = max(worst, operator_norm(expectation(model, em) - em))
        # bimodule over matrices with block-scalar entries
        b1 = np.kron(complex_matrix(rng, lvl, lvl), np.diag(np.repeat(rng.standard_normal(3), 2)).astype(complex))
        b2 = np.kron(complex_matrix(rng, lvl, lvl), np.diag(np.repeat(rng.standard_normal(3), 2)).astype(complex))
        worst = max(worst, operator_norm(expectation(model, b1 @ m @ b2) - b1 @ em @ b2))
        worst = max(worst, operator_norm(expectation(model, m.conj().T) - em.conj().T))
        pos = expectation(model, m @ m.conj().T)
        worst = max(worst, max(0.0, -float(np.linalg.eigvalsh(herm_part(pos))[0])))
    worst = max(worst, operator_norm(expectation(model, np.eye(6)) - np.eye(6)))
    return _result("expectation_axioms", 10, worst, 1e-12)


def check_omega_direct_sum(seed: int) -> CheckResult:
    rng = rng_stream(seed, "omega_direct_sum")
    worst = 0.0
    # scalar law
    law = ScalarLaw("bernoulli")
    rho = ScalarPower(2.0)
    b1 = point(np.array([[0.3 + 1.2j]]))
    w1, _ = subordination_solve(law, rho, b1)
    b2 = NcPoint(1, 2, np.kron(np.eye(2), b1.mat))
    w2, _ = subordination_solve(law, rho, b2)
    worst = max(worst, operator_norm(w2.mat - np.kron(np.eye(2), w1.mat)))
    # matrix model with a Kraus augmentation
    model = _sample_model(rng)
    v = np.diag(np.repeat([0.8, 0.5, 0.9], 2)).astype(complex)
    rho_m = KrausAugment((v,))
    mb1 = NcPoint(6, 1, _block_scalar(rng, model.blocks, im_floor=1.0))
    mw1, _ = subordination_solve(model, rho_m, mb1)
    mb2 = NcPoint(6, 2, np.kron(np.eye(2), mb1.mat))
    mw2, _ = subordination_solve(model, rho_m, mb2)
    worst = max(worst, operator_norm(mw2.mat - np.kron(np.eye(2), mw1.mat)))
    return _result("omega_direct_sum", 2, worst, 1e-8)


def check_subordination_certificate(seed: int) -> CheckResult:
    rng = rng_stream(seed, "subordination_certificate")
    worst = -float("inf")
    n = 0
    for law_kind, t in (("bernoulli", 2.0), ("bernoulli", 3.0), ("semicircle", 2.0)):
        law = ScalarLaw(law_kind)
        rho = ScalarPower(t)
        for _ in range(5):
            z = complex(rng.uniform(-2.0, 2.0), rng.uniform(0.4, 2.0))
            _, trace = subordination_solve(law, rho, point(np.array([[z]])))
            if trace.tail_ratio is not None and trace.contraction_bound is not None:
                worst = max(worst, trace.tail_ratio - trace.contraction_bound - 0.05)
            n += 1
    return _result("subordination_certificate", n, worst, 0.0)


def _h0_pair_defect(h0, a: NcPoint, c: NcPoint, b_mat: np.ndarray) -> float:
    # scale b so the block point stays well inside the half-plane
    sa = psd_inv_sqrt(imag_part(a.mat))
    sc = psd_inv_sqrt(imag_part(c.mat))
    g_raw = operator_norm(sa @ b_mat @ sc)
    tau = min(1.0, 1.8 / max(1e-12, g_raw))
    b = NcDirection(a.base_dim, a.level, c.level, tau * b_mat)
    gauge = g_raw * tau
    big = h0(block_upper(a, b, c))
    corner = big.mat[: a.dim, a.dim :]
    ha, hc = h0(a), h0(c)
    lhs = operator_norm(psd_inv_sqrt(imag_part(ha.mat)) @ corner @ psd_inv_sqrt(imag_part(hc.mat)))
    factor_a = 1.0 - h0.eps0 / float(np.linalg.eigvalsh(imag_part(ha.mat))[-1])
    factor_c = 1.0 - h0.eps0 / float(np.linalg.eigvalsh(imag_part(hc.mat))[-1])
    rhs_sq = gauge * gauge * factor_a * factor_c
    return lhs * lhs - rhs_sq * (1.0 + 1e-9) - 1e-12


def check_schwarz_pick_h0(seed: int) -> CheckResult:
    rng = rng_stream(seed, "schwarz_pick_h0")
    worst = -float("inf")
    n = 0
    h0_scalar = make_h0(ScalarLaw("bernoulli"), ScalarPower(2.0), point(np.array([[1.0j]])))
    for _ in range(8):
        a = halfplane_point(rng, 1, 1, im_floor=0.4)
        c = halfplane_point(rng, 1, 1, im_floor=0.4)
        b = complex_matrix(rng, 1, 1)
        worst = max(worst, _h0_pair_defect(h0_scalar, a, c, b))
        n += 1
    model = _sample_model(rng)
    v = np.diag(np.repeat([0.7, 1.0, 0.4], 2)).astype(complex)
    h0_mat = make_h0(model, KrausAugment((v,)), NcPoint(6, 1, 1.5j * np.eye(6)))
    for _ in range(6):
        # operands must live in the block algebra for h to be a map on H+(B)
        a = NcPoint(6, 1, _block_scalar(rng, model.blocks, im_floor=0.4))
        c = NcPoint(6, 1, _block_scalar(rng, model.blocks, im_floor=0.4))
        b = _block_scalar(rng, model.blocks)
        worst = max(worst, _h0_pair_defect(h0_mat, a, c, b))
        n += 1
    return _result("schwarz_pick_h0", n, worst, 0.0)


def check_imh_decay(seed: int) -> CheckResult:
    rng = rng_stream(seed, "imh_decay")
    worst = -float("inf")
    for model in (ScalarLaw("semicircle"), _sample_model(rng)):
        if isinstance(model, ScalarLaw):
            d, u = 1, hermitian_matrix(rng, 1)
        else:
            d = 6
            u = np.real(_block_scalar(rng, model.blocks)).astype(complex)
        ratios = []
        for y in (2.0, 8.0, 32.0, 128.0):
            b = NcPoint(d, 1, u + 1j * y * np.eye(d))
            _, h = F_and_h(model, b)
            ratios.append(operator_norm(imag_part(h.mat)) / y)
        worst = max(worst, max(later - earlier for earlier, later in zip(ratios, ratios[1:])))
        worst = max(worst, ratios[-1] - 1e-3)
    return _result("imh_decay", 8, worst, 0.0)


def check_gauge_matches_delta(seed: int) -> CheckResult:
    rng = rng_stream(seed, "gauge_matches_delta")
    worst = 0.0
    for _ in range(15):
        d, lvl = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a = halfplane_point(rng, lvl, d)
        c = halfplane_point(rng, lvl, d)
        worst = max(worst, abs(halfplane_gauge(a, c) - 2.0 * delta_tilde("halfplane", a, c).value))
        worst = max(worst, halfplane_gauge(a, a))
    return _result("gauge_matches_delta", 15, worst, 1e-10)


def check_fixed_point_range(seed: int) -> CheckResult:
    rng = rng_stream(seed, "fixed_point_range")
    h0 = make_h0(ScalarLaw("bernoulli"), ScalarPower(2.0), point(np.array([[2.0j]])))
    worst = -float("inf")
    n = 0
    for a_mat in (
        np.array([[1.0j]]),
        np.array([[0.5 + 0.8j]]),
        hermitian_matrix(rng, 2) + 1.0j * np.eye(2),
    ):
        a = NcPoint(1, a_mat.shape[0], a_mat)
        res = k0_and_fixed_point(h0, a)
        # the returned point must solve x = a + k0(x) and keep k0 in its disk
        recompute = a.mat - inverse(h0(NcPoint(1, a.level, -inverse(res.x.mat))).mat)
        worst = max(worst, operator_norm(recompute - res.x.mat) - 1e-9)
        n += 1
    return _result("fixed_point_range", n, worst, 0.0)


CHECKS = (
    check_eig_reconstruction,
    check_norm_unitary_invariance,
    check_psd_inv_sqrt,
    check_direct_sum_assoc,
    check_amplify_product,
    check_unitary_conj_spectrum,
    check_fdc_identity,
    check_function_axioms,
    check_moebius_ball_image,
    check_kernel_direct_sum_blocks,
    check_kernel_unitary_intertwine,
    check_ball_membership_norm,
    check_halfplane_membership,
    check_oracle_ball,
    check_oracle_halfplane,
    check_delta_homogeneity,
    check_delta_unitary_invariance,
    check_delta_direct_sum_max,
    check_delta_amplification,
    check_delta_nondegeneracy,
    check_tilde_matches_delta,
    check_ordering_chain,
    check_norm_lower_bound,
    check_upper_semicontinuity,
    check_boundary_blowup,
    check_spectral_disk_bounded,
    check_nesting_halves,
    check_moebius_isometry,
    check_polynomial_contraction,
    check_resolvent_negative_imag,
    check_expectation_axioms,
    check_omega_direct_sum,
    check_subordination_certificate,
    check_schwarz_pick_h0,
    check_imh_decay,
    check_gauge_matches_delta,
    check_fixed_point_range,
)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NCMETRIC_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(seed: int, threads: int | None = None) -> tuple[CheckResult, ...]:
    """Run every check; result order follows the registry, not the
    completion order, so reports are reproducible for any thread count."""
    if threads is None:
        threads = thread_count()
    if threads <= 1:
        return tuple(chk(seed) for chk in CHECKS)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(chk, seed) for chk in CHECKS]
        return tuple(f.result() for f in futures)


def report_csv(results) -> str:
    lines = ["check,samples,worst,tol,status"]
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{r.name},{r.samples},{r.worst!r},{r.tol!r},{status}")
    return "\n".join(lines) + "\n"


def all_passed(results) -> bool:
    return all(r.passed for r in results)
