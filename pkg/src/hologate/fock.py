"""Truncated two-mode bosonic Fock space and its ladder-operator algebra.

Basis convention: the state |n1, n2> sits at flat index n1 * (cutoff + 1) + n2,
so mode-1 operators are block structured and the four lowest states order as
|00>, |01>, |10>, |11>.  Creation maps the top level of a mode to zero (column
truncation), which keeps creator and annihilator exact adjoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SpaceMismatchError

DEFAULT_CUTOFF = 24


@dataclass(frozen=True)
class FockSpace:
    """Two boson modes, each truncated at `cutoff` photons per mode."""

    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be non-negative, got {self.cutoff}")

    @property
    def dim_per_mode(self) -> int:
        return self.cutoff + 1

    @property
    def total_dim(self) -> int:
        return self.dim_per_mode**2

    def flat_index(self, n1: int, n2: int) -> int:
        """Flat basis index of |n1, n2>."""
        if not (0 <= n1 <= self.cutoff and 0 <= n2 <= self.cutoff):
            raise ValueError(
                f"occupation ({n1}, {n2}) outside cutoff {self.cutoff}"
            )
        return n1 * self.dim_per_mode + n2

    def occupations(self) -> np.ndarray:
        """(total_dim, 2) array of (n1, n2) for each flat basis index."""
        n = np.arange(self.dim_per_mode)
        n1, n2 = np.meshgrid(n, n, indexing="ij")
        return np.stack([n1.ravel(), n2.ravel()], axis=1)


def _require_same_space(a, b):
    if a.space != b.space:
        raise SpaceMismatchError(
            f"operands on different spaces: cutoff {a.space.cutoff} vs {b.space.cutoff}"
        )


class FockOperator:
    """A dense complex matrix acting on a truncated two-mode Fock space."""

    __slots__ = ("matrix", "space")

    def __init__(self, matrix: np.ndarray, space: FockSpace):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (space.total_dim, space.total_dim):
            raise SpaceMismatchError(
                f"matrix shape {matrix.shape} does not match space dim {space.total_dim}"
            )
        self.matrix = matrix
        self.space = space

    def dag(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, self.space)

    def apply(self, vec: "FockVector") -> "FockVector":
        _require_same_space(self, vec)
        return FockVector(self.matrix @ vec.entries, self.space)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            _require_same_space(self, other)
            return FockOperator(self.matrix @ other.matrix, self.space)
        if isinstance(other, FockVector):
            return self.apply(other)
        return NotImplemented

    def __add__(self, other):
        _require_same_space(self, other)
        return FockOperator(self.matrix + other.matrix, self.space)

    def __sub__(self, other):
        _require_same_space(self, other)
        return FockOperator(self.matrix - other.matrix, self.space)

    def __mul__(self, scalar):
        return FockOperator(self.matrix * complex(scalar), self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return FockOperator(-self.matrix, self.space)

    def __repr__(self):
        return f"FockOperator(cutoff={self.space.cutoff}, dim={self.space.total_dim})"


class FockVector:
    """A state vector on a truncated two-mode Fock space."""

    __slots__ = ("entries", "space")

    def __init__(self, entries: np.ndarray, space: FockSpace):
        entries = np.asarray(entries, dtype=complex)
        if entries.shape != (space.total_dim,):
            raise SpaceMismatchError(
                f"vector length {entries.shape} does not match space dim {space.total_dim}"
            )
        self.entries = entries
        self.space = space

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def inner(self, other: "FockVector") -> complex:
        """<self|other>."""
        _require_same_space(self, other)
        return complex(np.vdot(self.entries, other.entries))

    def __repr__(self):
        return f"FockVector(cutoff={self.space.cutoff}, dim={self.space.total_dim})"


@lru_cache(maxsize=None)
def _single_mode_lowering(dim: int) -> np.ndarray:
    m = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _annihilator_matrix(cutoff: int, mode: int) -> np.ndarray:
    d = cutoff + 1
    a = _single_mode_lowering(d)
    eye = np.eye(d, dtype=complex)
    m = np.kron(a, eye) if mode == 1 else np.kron(eye, a)
    m.setflags(write=False)
    return m


def _check_mode(mode: int):
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode}")


def annihilator(space: FockSpace, mode: int) -> FockOperator:
    """Lowering operator of the given mode: <n-1|a|n> = sqrt(n)."""
    _check_mode(mode)
    return FockOperator(_annihilator_matrix(space.cutoff, mode), space)


def creator(space: FockSpace, mode: int) -> FockOperator:
    """Raising operator, the exact adjoint of :func:`annihilator`.

    On the truncated space the top level maps to zero.
    """
    _check_mode(mode)
    return FockOperator(_annihilator_matrix(space.cutoff, mode).conj().T, space)


def number_op(space: FockSpace, mode: int) -> FockOperator:
    """Diagonal photon-number operator of the given mode."""
    _check_mode(mode)
    occ = space.occupations()[:, mode - 1].astype(complex)
    return FockOperator(np.diag(occ), space)


def identity_op(space: FockSpace) -> FockOperator:
    return FockOperator(np.eye(space.total_dim, dtype=complex), space)


def basis_state(space: FockSpace, n1: int, n2: int) -> FockVector:
    """Unit vector |n1, n2>."""
    vec = np.zeros(space.total_dim, dtype=complex)
    vec[space.flat_index(n1, n2)] = 1.0
    return FockVector(vec, space)


def commutator(a: FockOperator, b: FockOperator) -> FockOperator:
    """AB - BA; raises on a cutoff mismatch."""
    _require_same_space(a, b)
    return FockOperator(a.matrix @ b.matrix - b.matrix @ a.matrix, a.space)


@lru_cache(maxsize=None)
def total_number_sectors(space: FockSpace) -> tuple[np.ndarray, ...]:
    """Basis-index groups of constant n1 + n2.

    Operators conserving the total photon number are exactly block diagonal
    over these groups, which makes their exponentials cheap.
    """
    occ = space.occupations()
    total = occ[:, 0] + occ[:, 1]
    return tuple(
        np.flatnonzero(total == s) for s in range(2 * space.cutoff + 1)
    )


@lru_cache(maxsize=None)
def mode_difference_sectors(space: FockSpace) -> tuple[np.ndarray, ...]:
    """Basis-index groups of constant n1 - n2 (conserved by pair creation)."""
    occ = space.occupations()
    diff = occ[:, 0] - occ[:, 1]
    return tuple(
        np.flatnonzero(diff == d)
        for d in range(-space.cutoff, space.cutoff + 1)
    )
