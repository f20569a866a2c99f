"""Points and directions of a matrix-level graded set.

A point at level n over base dimension d is an (n*d) x (n*d) complex
matrix, thought of as an n x n array of d x d blocks. Directions are
the off-diagonal data: rectangular block matrices joining a row level
to a column level. The structural operations (direct sums, scalar
amplification, upper-triangular block assembly, level-space unitary
conjugation) are what every pseudometric and difference-differential
computation downstream is built from.

Conventions: a scalar level matrix Z of shape k x k acts on base
blocks via the Kronecker product kron(Z, I_d); amplify(Z, b) is
kron(Z, b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import NcmetricError, as_matrix, mat_from_json, mat_to_json

UNITARY_TOL = 1e-10


class BaseDimMismatch(NcmetricError):
    """Operands live over different base dimensions."""


class DimMismatch(NcmetricError):
    """Level or shape mismatch between operands."""


class NotUnitary(NcmetricError):
    """The supplied level matrix is not unitary to tolerance."""


@dataclass(frozen=True)
class NcPoint:
    """A level-n point: mat is (level*base_dim) square."""

    base_dim: int
    level: int
    mat: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        n = self.level * self.base_dim
        if self.base_dim < 1 or self.level < 1:
            raise ValueError("base_dim and level must be positive")
        if m.shape != (n, n):
            raise DimMismatch(
                f"level {self.level} point over base_dim {self.base_dim} "
                f"needs shape {(n, n)}, got {m.shape}"
            )

    @property
    def dim(self) -> int:
        return self.level * self.base_dim

    def adjoint(self) -> "NcPoint":
        return NcPoint(self.base_dim, self.level, self.mat.conj().T)


@dataclass(frozen=True)
class NcDirection:
    """A rectangular block direction from row_level to col_level."""

    base_dim: int
    row_level: int
    col_level: int
    mat: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        shape = (self.row_level * self.base_dim, self.col_level * self.base_dim)
        if self.base_dim < 1 or self.row_level < 1 or self.col_level < 1:
            raise ValueError("base_dim and levels must be positive")
        if m.shape != shape:
            raise DimMismatch(f"direction needs shape {shape}, got {m.shape}")

    def adjoint(self) -> "NcDirection":
        return NcDirection(self.base_dim, self.col_level, self.row_level, self.mat.conj().T)


def point(mat, base_dim: int = 1) -> NcPoint:
    """Wrap a square matrix as a point, inferring the level."""
    m = as_matrix(mat)
    if m.shape[0] != m.shape[1]:
        raise DimMismatch(f"points are square, got {m.shape}")
    if m.shape[0] % base_dim:
        raise DimMismatch(f"size {m.shape[0]} is not a multiple of base_dim {base_dim}")
    return NcPoint(base_dim, m.shape[0] // base_dim, m)


def direction(mat, base_dim: int = 1) -> NcDirection:
    """Wrap a rectangular matrix as a direction, inferring the levels."""
    m = as_matrix(mat)
    if m.shape[0] % base_dim or m.shape[1] % base_dim:
        raise DimMismatch(f"shape {m.shape} is not a multiple of base_dim {base_dim}")
    return NcDirection(base_dim, m.shape[0] // base_dim, m.shape[1] // base_dim, m)


def direct_sum(a: NcPoint, c: NcPoint) -> NcPoint:
    """diag(a, c) at level a.level + c.level."""
    if a.base_dim != c.base_dim:
        raise BaseDimMismatch(f"base dims {a.base_dim} != {c.base_dim}")
    out = np.zeros((a.dim + c.dim, a.dim + c.dim), dtype=np.complex128)
    out[: a.dim, : a.dim] = a.mat
    out[a.dim :, a.dim :] = c.mat
    return NcPoint(a.base_dim, a.level + c.level, out)


def amplify(z, b: NcPoint) -> NcPoint:
    """kron(Z, b) for a scalar k x k level matrix Z."""
    z = as_matrix(z)
    if z.shape[0] != z.shape[1]:
        raise DimMismatch(f"level matrix must be square, got {z.shape}")
    return NcPoint(b.base_dim, z.shape[0] * b.level, np.kron(z, b.mat))


def block_upper(a: NcPoint, b: NcDirection, c: NcPoint) -> NcPoint:
    """[[a, b], [0, c]] at level a.level + c.level."""
    if a.base_dim != c.base_dim or a.base_dim != b.base_dim:
        raise BaseDimMismatch(
            f"base dims {(a.base_dim, b.base_dim, c.base_dim)} disagree"
        )
    if b.row_level != a.level or b.col_level != c.level:
        raise DimMismatch(
            f"direction levels {(b.row_level, b.col_level)} do not join "
            f"point levels {(a.level, c.level)}"
        )
    out = np.zeros((a.dim + c.dim, a.dim + c.dim), dtype=np.complex128)
    out[: a.dim, : a.dim] = a.mat
    out[: a.dim, a.dim :] = b.mat
    out[a.dim :, a.dim :] = c.mat
    return NcPoint(a.base_dim, a.level + c.level, out)


def unitary_conjugate(u, a: NcPoint) -> NcPoint:
    """(U kron I_d) a (U* kron I_d) for a unitary level matrix U."""
    u = as_matrix(u)
    if u.shape != (a.level, a.level):
        raise DimMismatch(f"level matrix shape {u.shape} != {(a.level, a.level)}")
    defect = float(np.linalg.norm(u.conj().T @ u - np.eye(a.level)))
    if defect > UNITARY_TOL:
        raise NotUnitary(f"||U*U - I|| = {defect:.3e}")
    ud = np.kron(u, np.eye(a.base_dim, dtype=np.complex128))
    return NcPoint(a.base_dim, a.level, ud @ a.mat @ ud.conj().T)


def point_to_json(a: NcPoint) -> dict:
    return {"base_dim": a.base_dim, "level": a.level, "mat": mat_to_json(a.mat)}


def point_from_json(obj) -> NcPoint:
    if not isinstance(obj, dict):
        raise ValueError("point JSON must be an object")
    try:
        return NcPoint(int(obj["base_dim"]), int(obj["level"]), mat_from_json(obj["mat"]))
    except KeyError as exc:
        raise ValueError(f"point JSON missing field {exc}") from None


def direction_to_json(b: NcDirection) -> dict:
    return {
        "base_dim": b.base_dim,
        "row_level": b.row_level,
        "col_level": b.col_level,
        "mat": mat_to_json(b.mat),
    }


def direction_from_json(obj) -> NcDirection:
    if not isinstance(obj, dict):
        raise ValueError("direction JSON must be an object")
    try:
        return NcDirection(
            int(obj["base_dim"]),
            int(obj["row_level"]),
            int(obj["col_level"]),
            mat_from_json(obj["mat"]),
        )
    except KeyError as exc:
        raise ValueError(f"direction JSON missing field {exc}") from None
