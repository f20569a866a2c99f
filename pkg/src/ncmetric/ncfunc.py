"""Matrix functions that respect direct sums and intertwinings.

Variants: polynomials, a ball Moebius map, affine maps, scalar
calculus from a coefficient list with a convergence radius, and
compositions. Evaluation is plain matrix substitution, so the
direct-sum and intertwining laws hold automatically; check_axioms
measures them anyway on supplied samples.

delta_f extracts the difference-differential from one evaluation at
an upper-triangular 2x2 block point: the (1,2) corner of
f([[a, b], [0, c]]) is Delta f(a, c)(b).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import (
    NcmetricError,
    SingularMatrix,
    as_matrix,
    complex_from_json,
    complex_to_json,
    inverse,
    operator_norm,
)
from .ncpoint import NcDirection, NcPoint, block_upper

# Ball Moebius parameters must stay this far inside the disk.
MOEBIUS_ALPHA_MAX = 1.0 - 1e-9
# Scalar-calculus truncation: stop once the coefficient-majorant tail
# at the argument's norm drops below this.
SERIES_TAIL_TOL = 1e-12


class DomainViolation(NcmetricError):
    """The function cannot be evaluated at the given point."""


class SeriesNotConverged(NcmetricError):
    """The argument lies outside the stated convergence radius."""


@dataclass(frozen=True)
class Polynomial:
    """p(z) = sum coeffs[k] z^k, evaluated by Horner substitution."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))


@dataclass(frozen=True)
class MoebiusBall:
    """z -> (z - alpha)(1 - conj(alpha) z)^(-1), an automorphism of the ball.

    The two factor orders agree: both are rational functions of the
    same matrix, so they commute. Evaluation uses resolvent-first,
    (b - alpha) @ (1 - conj(alpha) b)^(-1); equality of the orders is
    covered by tests.
    """

    alpha: complex

    def __post_init__(self):
        a = complex(self.alpha)
        object.__setattr__(self, "alpha", a)
        if abs(a) >= MOEBIUS_ALPHA_MAX:
            raise ValueError(f"|alpha| = {abs(a):.12f} must be < {MOEBIUS_ALPHA_MAX}")


@dataclass(frozen=True)
class CayleyLike:
    """Affine map z -> beta z + gamma."""

    beta: complex
    gamma: complex

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "gamma", complex(self.gamma))


@dataclass(frozen=True)
class ScalarCalculus:
    """Power series sum coeffs[k] z^k with a stated convergence radius.

    Evaluation requires ||a|| < radius and truncates once the
    majorant tail sum_{j>=k} |c_j| ||a||^j falls below SERIES_TAIL_TOL;
    no eigendecomposition of the argument is used.
    """

    coeffs: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Composition:
    """parts applied left to right: f = parts[-1] o ... o parts[0]."""

    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("composition needs at least one part")


FunctionSpec = (Polynomial, MoebiusBall, CayleyLike, ScalarCalculus, Composition)


def eval_mat(f, m: np.ndarray) -> np.ndarray:
    """Evaluate f at a plain square matrix."""
    m = as_matrix(m)
    eye = np.eye(m.shape[0], dtype=np.complex128)
    if isinstance(f, Polynomial):
        if not f.coeffs:
            return np.zeros_like(m)
        acc = f.coeffs[-1] * eye
        for c in reversed(f.coeffs[:-1]):
            acc = acc @ m + c * eye
        return acc
    if isinstance(f, MoebiusBall):
        try:
            res = inverse(eye - np.conj(f.alpha) * m)
        except SingularMatrix as exc:
            raise DomainViolation(f"Moebius pole proximity: {exc}") from None
        return (m - f.alpha * eye) @ res
    if isinstance(f, CayleyLike):
        return f.beta * m + f.gamma * eye
    if isinstance(f, ScalarCalculus):
        r = operator_norm(m)
        if r >= f.radius:
            raise SeriesNotConverged(
                f"||a|| = {r:.6g} is not inside radius {f.radius:.6g}"
            )
        majorant = np.array([abs(c) for c in f.coeffs], dtype=np.float64)
        powers = r ** np.arange(len(f.coeffs))
        # tails[k] = sum_{j >= k} |c_j| r^j
        tails = np.concatenate([np.cumsum((majorant * powers)[::-1])[::-1], [0.0]])
        acc = np.zeros_like(m)
        term = eye
        for k, c in enumerate(f.coeffs):
            if tails[k] < SERIES_TAIL_TOL:
                break
            acc = acc + c * term
            term = term @ m
        return acc
    if isinstance(f, Composition):
        for part in f.parts:
            m = eval_mat(part, m)
        return m
    raise TypeError(f"not a function spec: {type(f).__name__}")


def eval_point(f, a: NcPoint) -> NcPoint:
    """Evaluate f at a point; the result lives at the same level."""
    return NcPoint(a.base_dim, a.level, eval_mat(f, a.mat))


def delta_f(f, a: NcPoint, c: NcPoint, b: NcDirection) -> NcDirection:
    """Difference-differential Delta f(a, c)(b) by block evaluation.

    Only evaluability of f at the block point is needed, not domain
    membership of the block. The result is linear in b and satisfies
    Delta f(a, c)(a - c) = f(a) - f(c).
    """
    big = eval_mat(f, block_upper(a, b, c).mat)
    corner = big[: a.dim, a.dim :]
    return NcDirection(a.base_dim, a.level, c.level, corner)


def check_axioms(f, points, rng=None, rel_tol: float = 1e-10) -> dict:
    """Measure the direct-sum and intertwining laws on sample points.

    For each consecutive pair of points the direct-sum defect
    ||f(a (+) c) - f(a) (+) f(c)|| is recorded, along with the
    permutation-swap defect. For each point an invertible level matrix
    S produces c = S^(-1) a S and the intertwining defect
    ||f(a) S - S f(c)||, scaled by the conditioning of S.

    Returns a report dict; report["ok"] is True when every defect is
    within rel_tol of scale.
    """
    if rng is None:
        rng = np.random.Generator(np.random.Philox(20240214))
    points = list(points)
    direct_sum_defects = []
    swap_defects = []
    intertwine_defects = []
    for a, c in zip(points, points[1:]):
        fa, fc = eval_mat(f, a.mat), eval_mat(f, c.mat)
        both = np.zeros((a.dim + c.dim, a.dim + c.dim), dtype=np.complex128)
        both[: a.dim, : a.dim] = a.mat
        both[a.dim :, a.dim :] = c.mat
        fboth = eval_mat(f, both)
        expect = np.zeros_like(both)
        expect[: a.dim, : a.dim] = fa
        expect[a.dim :, a.dim :] = fc
        scale = max(1.0, float(np.linalg.norm(expect)))
        direct_sum_defects.append(float(np.linalg.norm(fboth - expect)) / scale)
        # Swapped order reproduces the diagonal blocks up to an ulp; blas
        # reduction grouping shifts with the block offset when dims differ.
        swapped = np.zeros_like(both)
        swapped[: c.dim, : c.dim] = c.mat
        swapped[c.dim :, c.dim :] = a.mat
        fswapped = eval_mat(f, swapped)
        swap = max(
            float(np.max(np.abs(fswapped[c.dim :, c.dim :] - fboth[: a.dim, : a.dim]))),
            float(np.max(np.abs(fswapped[: c.dim, : c.dim] - fboth[a.dim :, a.dim :]))),
        )
        swap_defects.append(swap)
    for a in points:
        # Well-conditioned S keeps c = S^(-1) a S evaluable for every variant.
        g = rng.standard_normal((a.dim, a.dim)) + 1j * rng.standard_normal((a.dim, a.dim))
        s = np.eye(a.dim, dtype=np.complex128) + 0.2 * g / max(1.0, operator_norm(g))
        c = inverse(s) @ a.mat @ s
        lhs = eval_mat(f, a.mat) @ s
        rhs = s @ eval_mat(f, c)
        scale = max(1.0, float(np.linalg.norm(lhs))) * float(np.linalg.cond(s))
        intertwine_defects.append(float(np.linalg.norm(lhs - rhs)) / scale)
    worst = max(direct_sum_defects + intertwine_defects, default=0.0)
    worst_swap = max(swap_defects, default=0.0)
    return {
        "samples": len(points),
        "direct_sum_max": max(direct_sum_defects, default=0.0),
        "swap_max": worst_swap,
        "intertwining_max": max(intertwine_defects, default=0.0),
        "ok": bool(worst <= rel_tol and worst_swap <= rel_tol),
    }


def func_to_json(f) -> dict:
    if isinstance(f, Polynomial):
        return {"variant": "polynomial", "coeffs": [complex_to_json(c) for c in f.coeffs]}
    if isinstance(f, MoebiusBall):
        return {"variant": "moebius_ball", "alpha": complex_to_json(f.alpha)}
    if isinstance(f, CayleyLike):
        return {
            "variant": "cayley_like",
            "beta": complex_to_json(f.beta),
            "gamma": complex_to_json(f.gamma),
        }
    if isinstance(f, ScalarCalculus):
        return {
            "variant": "scalar_calculus",
            "coeffs": [complex_to_json(c) for c in f.coeffs],
            "radius": float(f.radius),
        }
    if isinstance(f, Composition):
        return {"variant": "composition", "parts": [func_to_json(p) for p in f.parts]}
    raise TypeError(f"not a function spec: {type(f).__name__}")


def func_from_json(obj):
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError("function JSON must be an object with a 'variant' tag")
    v = obj["variant"]
    try:
        if v == "polynomial":
            return Polynomial(tuple(complex_from_json(c) for c in obj["coeffs"]))
        if v == "moebius_ball":
            return MoebiusBall(complex_from_json(obj["alpha"]))
        if v == "cayley_like":
            return CayleyLike(complex_from_json(obj["beta"]), complex_from_json(obj["gamma"]))
        if v == "scalar_calculus":
            return ScalarCalculus(
                tuple(complex_from_json(c) for c in obj["coeffs"]), float(obj["radius"])
            )
        if v == "composition":
            return Composition(tuple(func_from_json(p) for p in obj["parts"]))
    except KeyError as exc:
        raise ValueError(f"function JSON missing field {exc}") from None
    raise ValueError(f"unknown function variant {v!r}")
