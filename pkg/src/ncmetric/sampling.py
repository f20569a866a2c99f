"""Seeded samplers used by the invariant suite, the CLI, and tests.

Every sampler draws from a counter-based Philox generator keyed by
(seed, crc32(stream name)), so a given seed fully determines every
sample regardless of execution order or thread count. That is what
makes repeated `props --seed N` runs byte-identical.
"""

from __future__ import annotations

import zlib

import numpy as np

from .domains import (
    BallKernel,
    HalfPlaneKernel,
    KernelDomain,
    NilpotentCone,
    SpectralDisk,
    contains,
)
from .matcore import operator_norm
from .ncpoint import NcDirection, NcPoint


def rng_stream(seed: int, stream: str) -> np.random.Generator:
    """Independent Philox substream for (seed, stream)."""
    key = np.array([np.uint64(seed), np.uint64(zlib.crc32(stream.encode()))])
    return np.random.Generator(np.random.Philox(key=key))


def complex_matrix(rng, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return scale * (re + 1j * im) / np.sqrt(2.0)


def hermitian_matrix(rng, n: int, scale: float = 1.0) -> np.ndarray:
    g = complex_matrix(rng, n, n, scale)
    return (g + g.conj().T) / 2.0


def unitary_matrix(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_matrix(rng, n, n))
    # Fix the phases so the distribution (and the matrix) is well defined.
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def invertible_matrix(rng, n: int, spread: float = 0.4) -> np.ndarray:
    g = complex_matrix(rng, n, n)
    return np.eye(n, dtype=np.complex128) + spread * g / max(1e-12, operator_norm(g))


def ball_point(rng, level: int, base_dim: int, radius: float = 1.0, fill: float = 0.75) -> NcPoint:
    """A point with operator norm uniform in [0.1, fill] * radius."""
    n = level * base_dim
    g = complex_matrix(rng, n, n)
    target = radius * rng.uniform(0.1, fill)
    return NcPoint(base_dim, level, g * (target / max(1e-12, operator_norm(g))))


def halfplane_point(rng, level: int, base_dim: int, im_floor: float = 0.3) -> NcPoint:
    """Re arbitrary Hermitian, Im = positive definite with a floor."""
    n = level * base_dim
    re = hermitian_matrix(rng, n)
    w = complex_matrix(rng, n, n)
    im = w @ w.conj().T / n + rng.uniform(im_floor, im_floor + 1.0) * np.eye(n)
    return NcPoint(base_dim, level, re + 1j * im)


def selfadjoint_disk_point(rng, level: int, base_dim: int, radius: float, fill: float = 0.9) -> NcPoint:
    """Hermitian point with norm (= spectral radius) below fill * radius."""
    n = level * base_dim
    h = hermitian_matrix(rng, n)
    target = radius * fill * rng.uniform(0.1, 1.0)
    return NcPoint(base_dim, level, h * (target / max(1e-12, operator_norm(h))))


def nilpotent_point(rng, level: int, base_dim: int, scale: float = 1.0) -> NcPoint:
    n = level * base_dim
    m = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1):
        m[i, i + 1 :] = complex_matrix(rng, 1, n - i - 1, scale)
    return NcPoint(base_dim, level, m)


def direction_sample(
    rng, base_dim: int, row_level: int, col_level: int, scale: float = 1.0
) -> NcDirection:
    g = complex_matrix(rng, row_level * base_dim, col_level * base_dim)
    target = scale * rng.uniform(0.2, 1.0)
    return NcDirection(
        base_dim, row_level, col_level, g * (target / max(1e-12, operator_norm(g)))
    )


def sample_in_domain(
    domain, rng, level: int, base_dim: int, max_tries: int = 200
) -> NcPoint:
    """Draw a point strictly inside the domain, by shape-aware proposal
    plus rejection for the composed kernels."""
    for _ in range(max_tries):
        if isinstance(domain, KernelDomain):
            if isinstance(domain.kernel, HalfPlaneKernel):
                p = halfplane_point(rng, level, base_dim)
            else:
                # Ball-like proposals, shrunk progressively for composed kernels.
                p = ball_point(rng, level, base_dim, radius=1.0, fill=0.7)
        elif isinstance(domain, SpectralDisk):
            p = selfadjoint_disk_point(rng, level, base_dim, domain.radius)
            if domain.center:
                n = level * base_dim
                p = NcPoint(base_dim, level, p.mat + complex(domain.center) * np.eye(n))
        elif isinstance(domain, NilpotentCone):
            p = nilpotent_point(rng, level, base_dim)
        else:
            raise TypeError(f"no sampler for {type(domain).__name__}")
        if contains(domain, p).inside:
            return p
        if isinstance(domain, KernelDomain):
            # Composed domains can be much smaller than the unit ball.
            p2 = NcPoint(base_dim, level, p.mat * 0.2)
            if contains(domain, p2).inside:
                return p2
    raise RuntimeError(
        f"could not hit {type(domain).__name__} in {max_tries} tries"
    )
