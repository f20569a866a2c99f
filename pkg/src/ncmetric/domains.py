"""Kernels, the domains they cut out, and kernel derivatives.

A kernel K assigns to a pair of points (a, c) a linear map in P:

    half_plane:           K(a,c)(P) = (a P - P c*) / 2i
    ball:                 K(a,c)(P) = P - a P c*
    composed_ball:        K(a,c)(P) = P - G(a) P G(c)*
    composed_half_plane:  K(a,c)(P) = (G(a) P - P G(c)*) / 2i

The "1" of the classical kernels is the identity component, so every
variant is linear in P; both the direct-sum block law and the
intertwining law depend on that.

KernelDomain(K) is the set where K(a,a)(I) is strictly positive.
SpectralDisk and NilpotentCone are the two non-kernel domains used by
the counterexample reproductions.

kernel_diffs assembles the three first-order kernel derivatives in a
single evaluation: with X = [[a, b], [0, c]], Y = [[c*, b*], [0, a*]]
and P arranged to put the identity in the lower-left block, the four
blocks of the affine pairing H(X, Y)(P) are exactly D0, D01, the
self-gram of c, and D1; every unwanted summand vanishes because the
kernels are linear in P.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    NcmetricError,
    as_matrix,
    herm_part,
    is_strictly_positive,
    operator_norm,
)
from .ncfunc import DomainViolation, SeriesNotConverged, eval_mat, func_from_json, func_to_json
from .ncpoint import BaseDimMismatch, DimMismatch, NcDirection, NcPoint

# Default membership margin (relative, via is_strictly_positive).
MEMBERSHIP_MARGIN = 1e-9
# ||a^m|| <= NILPOTENT_TOL * ||a||^m counts as nilpotent at size m.
NILPOTENT_TOL = 1e-10


class EvaluationFailure(NcmetricError):
    """A kernel (or its composing function) failed to evaluate."""


class PointOutsideDomain(NcmetricError):
    """An operation required a point strictly inside a domain."""


@dataclass(frozen=True)
class HalfPlaneKernel:
    pass


@dataclass(frozen=True)
class BallKernel:
    pass


@dataclass(frozen=True)
class ComposedBallKernel:
    g: object


@dataclass(frozen=True)
class ComposedHalfPlaneKernel:
    g: object


KernelSpec = (HalfPlaneKernel, BallKernel, ComposedBallKernel, ComposedHalfPlaneKernel)


@dataclass(frozen=True)
class KernelDomain:
    kernel: object


@dataclass(frozen=True)
class NormBound:
    """Norm bound rule: 'constant' uses value, 'level' uses value * level."""

    rule: str
    value: float = 1.0

    def __post_init__(self):
        if self.rule not in ("constant", "level"):
            raise ValueError(f"unknown norm bound rule {self.rule!r}")
        object.__setattr__(self, "value", float(self.value))

    def at_level(self, level: int) -> float:
        return self.value if self.rule == "constant" else self.value * level


@dataclass(frozen=True)
class SpectralDisk:
    """Points whose spectrum sits in an open disk, with a norm cap."""

    center: complex
    radius: float
    norm_bound: NormBound

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class NilpotentCone:
    pass


DomainSpec = (KernelDomain, SpectralDisk, NilpotentCone)


@dataclass(frozen=True)
class Membership:
    inside: bool
    diagnostic: str | None = None

    def __bool__(self) -> bool:
        return self.inside


def _apply_g(g, m: np.ndarray) -> np.ndarray:
    try:
        return eval_mat(g, m)
    except (DomainViolation, SeriesNotConverged) as exc:
        raise EvaluationFailure(f"composing function failed: {exc}") from None


def _pair_eval(kernel, x: np.ndarray, y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Affine pairing H(x, y)(P): y enters on the starred side.

    For plain points y = c*, this is K(a, c)(P). For the composed
    variants the starred side applies z -> G(z*)* so that derivative
    block evaluations remain plain matrix arithmetic.
    """
    if isinstance(kernel, BallKernel):
        return p - x @ p @ y
    if isinstance(kernel, HalfPlaneKernel):
        return (x @ p - p @ y) / 2.0j
    if isinstance(kernel, ComposedBallKernel):
        return p - _apply_g(kernel.g, x) @ p @ _apply_g(kernel.g, y.conj().T).conj().T
    if isinstance(kernel, ComposedHalfPlaneKernel):
        gx = _apply_g(kernel.g, x)
        gy = _apply_g(kernel.g, y.conj().T).conj().T
        return (gx @ p - p @ gy) / 2.0j
    raise TypeError(f"not a kernel spec: {type(kernel).__name__}")


def kernel_eval(kernel, a: NcPoint, c: NcPoint, p=None) -> np.ndarray:
    """K(a, c)(P). P defaults to the identity (square case only)."""
    if a.base_dim != c.base_dim:
        raise BaseDimMismatch(f"base dims {a.base_dim} != {c.base_dim}")
    if p is None:
        if a.dim != c.dim:
            raise DimMismatch("identity P needs matching point sizes")
        p = np.eye(a.dim, dtype=np.complex128)
    p = as_matrix(p)
    if p.shape != (a.dim, c.dim):
        raise DimMismatch(f"P has shape {p.shape}, expected {(a.dim, c.dim)}")
    return _pair_eval(kernel, a.mat, c.mat.conj().T, p)


def gram(kernel, a: NcPoint, c: NcPoint | None = None) -> np.ndarray:
    """K(a, c)(I); the self-gram K(a, a)(I) decides membership."""
    return kernel_eval(kernel, a, a if c is None else c, None)


def kernel_diffs(kernel, a: NcPoint, c: NcPoint, b: NcDirection):
    """First-order kernel derivatives (D0, D1, D01) from one evaluation.

    D0  perturbs the left argument of K(., c)(., 1) at a along b;
    D1  perturbs the right argument of K(c, .)(1, .) at a along b;
    D01 is the mixed second derivative. Shapes: D0 is a.dim x c.dim,
    D1 is c.dim x a.dim, D01 is a.dim x a.dim.
    """
    if a.base_dim != c.base_dim or a.base_dim != b.base_dim:
        raise BaseDimMismatch(
            f"base dims {(a.base_dim, b.base_dim, c.base_dim)} disagree"
        )
    if b.row_level != a.level or b.col_level != c.level:
        raise DimMismatch(
            f"direction levels {(b.row_level, b.col_level)} do not join "
            f"point levels {(a.level, c.level)}"
        )
    na, mc = a.dim, c.dim
    x = np.zeros((na + mc, na + mc), dtype=np.complex128)
    x[:na, :na] = a.mat
    x[:na, na:] = b.mat
    x[na:, na:] = c.mat
    y = np.zeros((mc + na, mc + na), dtype=np.complex128)
    y[:mc, :mc] = c.mat.conj().T
    y[:mc, mc:] = b.mat.conj().T
    y[mc:, mc:] = a.mat.conj().T
    p = np.zeros((na + mc, mc + na), dtype=np.complex128)
    p[na:, :mc] = np.eye(mc)
    r = _pair_eval(kernel, x, y, p)
    d0 = r[:na, :mc]
    d01 = r[:na, mc:]
    d1 = r[na:, mc:]
    return d0, d1, d01


def contains(domain, a: NcPoint, margin: float = MEMBERSHIP_MARGIN) -> Membership:
    """Strict membership with a positivity margin; never raises.

    Numerical failure (a composing function blowing up, a singular
    gram) yields Membership(False, diagnostic=...) rather than an
    exception.
    """
    if isinstance(domain, KernelDomain):
        try:
            g = gram(domain.kernel, a)
        except EvaluationFailure as exc:
            return Membership(False, diagnostic=str(exc))
        if not np.all(np.isfinite(g)):
            return Membership(False, diagnostic="gram evaluation overflowed")
        return Membership(bool(is_strictly_positive(herm_part(g), margin)))
    if isinstance(domain, SpectralDisk):
        try:
            eigs = np.linalg.eigvals(a.mat)
        except np.linalg.LinAlgError as exc:
            return Membership(False, diagnostic=f"eigenvalue failure: {exc}")
        in_disk = bool(np.max(np.abs(eigs - domain.center)) < domain.radius - margin)
        bound = domain.norm_bound.at_level(a.level)
        return Membership(in_disk and operator_norm(a.mat) < bound - margin)
    if isinstance(domain, NilpotentCone):
        m = a.dim
        norm = operator_norm(a.mat)
        power = np.linalg.matrix_power(a.mat, m)
        return Membership(bool(operator_norm(power) <= NILPOTENT_TOL * norm**m))
    raise TypeError(f"not a domain spec: {type(domain).__name__}")


def require_inside(domain, a: NcPoint, margin: float = MEMBERSHIP_MARGIN, name: str = "point"):
    mem = contains(domain, a, margin)
    if not mem.inside:
        extra = f" ({mem.diagnostic})" if mem.diagnostic else ""
        raise PointOutsideDomain(f"{name} is not strictly inside the domain{extra}")


def ball_domain(radius: float = 1.0) -> KernelDomain:
    """The operator ball of the given radius as a kernel domain."""
    from .ncfunc import Polynomial

    if radius == 1.0:
        return KernelDomain(BallKernel())
    return KernelDomain(ComposedBallKernel(Polynomial((0.0, 1.0 / radius))))


def halfplane_domain() -> KernelDomain:
    return KernelDomain(HalfPlaneKernel())


def kernel_to_json(kernel) -> dict:
    if isinstance(kernel, HalfPlaneKernel):
        return {"variant": "half_plane"}
    if isinstance(kernel, BallKernel):
        return {"variant": "ball"}
    if isinstance(kernel, ComposedBallKernel):
        return {"variant": "composed_ball", "g": func_to_json(kernel.g)}
    if isinstance(kernel, ComposedHalfPlaneKernel):
        return {"variant": "composed_half_plane", "g": func_to_json(kernel.g)}
    raise TypeError(f"not a kernel spec: {type(kernel).__name__}")


def kernel_from_json(obj):
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError("kernel JSON must be an object with a 'variant' tag")
    v = obj["variant"]
    if v == "half_plane":
        return HalfPlaneKernel()
    if v == "ball":
        return BallKernel()
    if v in ("composed_ball", "composed_half_plane"):
        try:
            g = func_from_json(obj["g"])
        except KeyError:
            raise ValueError("composed kernel JSON missing field 'g'") from None
        return ComposedBallKernel(g) if v == "composed_ball" else ComposedHalfPlaneKernel(g)
    raise ValueError(f"unknown kernel variant {v!r}")


def domain_to_json(domain) -> dict:
    if isinstance(domain, KernelDomain):
        return {"variant": "kernel_domain", "kernel": kernel_to_json(domain.kernel)}
    if isinstance(domain, SpectralDisk):
        return {
            "variant": "spectral_disk",
            "center": [domain.center.real, domain.center.imag],
            "radius": domain.radius,
            "norm_bound": {"rule": domain.norm_bound.rule, "value": domain.norm_bound.value},
        }
    if isinstance(domain, NilpotentCone):
        return {"variant": "nilpotent_cone"}
    raise TypeError(f"not a domain spec: {type(domain).__name__}")


def domain_from_json(obj):
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError("domain JSON must be an object with a 'variant' tag")
    v = obj["variant"]
    try:
        if v == "kernel_domain":
            return KernelDomain(kernel_from_json(obj["kernel"]))
        if v == "spectral_disk":
            nb = obj["norm_bound"]
            return SpectralDisk(
                complex(float(obj["center"][0]), float(obj["center"][1])),
                float(obj["radius"]),
                NormBound(nb["rule"], nb.get("value", 1.0)),
            )
        if v == "nilpotent_cone":
            return NilpotentCone()
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed domain JSON: {exc}") from None
    raise ValueError(f"unknown domain variant {v!r}")
