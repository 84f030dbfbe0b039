"""Schwinger generators and the coherent operators built from them.

The beam-splitter-type operator u_op(xi) exponentiates the compact
generators (number conserving: no truncation leakage), the squeezing-type
operator v_op(zeta) exponentiates the pair-creation generators (conserves
the mode difference n1 - n2; amplitudes leak upward like tanh(|zeta|)^n, so
accuracy is set by the cutoff).  Both also come in a disentangled form: a
normal-ordered product of three exponentials.

Matrix exponentials of anti-hermitian inputs go through a unitary
eigendecomposition so the results are unitary to machine precision; general
inputs fall back to scaling-and-squaring.  Exponents with a conserved
quantum number are exponentiated block-by-block over the conservation
sectors, which is exact and much faster than a dense exponential.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import ParameterDomainError
from .fock import (
    FockOperator,
    FockSpace,
    annihilator,
    creator,
    mode_difference_sectors,
    number_op,
    total_number_sectors,
)
from .scalars import tan_ratio, tanh_ratio

_ANTIHERM_RTOL = 1e-12

# Default pairing of squeezing budget and cutoff: the squeezed-vacuum tail
# tanh(0.5)^25 ~ 4e-9 keeps truncation error below ~1e-8.
ZETA_BUDGET = 0.5


def su2_generators(space: FockSpace) -> tuple[FockOperator, FockOperator, FockOperator]:
    """Compact Schwinger triple (J+, J-, J3) on two modes.

    J+ = a1†a2, J- = a2†a1, J3 = (a1†a1 - a2†a2)/2; all three conserve the
    total photon number.
    """
    jp, jm, j3 = _su2_matrices(space)
    return FockOperator(jp, space), FockOperator(jm, space), FockOperator(j3, space)


def su11_generators(space: FockSpace) -> tuple[FockOperator, FockOperator, FockOperator]:
    """Non-compact Schwinger triple (K+, K-, K3).

    K+ = a1†a2†, K- = a2 a1, K3 = (a1†a1 + a2†a2 + 1)/2; all three conserve
    the mode difference n1 - n2.
    """
    kp, km, k3 = _su11_matrices(space)
    return FockOperator(kp, space), FockOperator(km, space), FockOperator(k3, space)


@lru_cache(maxsize=None)
def _su2_matrices(space: FockSpace):
    a1 = annihilator(space, 1).matrix
    a2 = annihilator(space, 2).matrix
    jp = a1.conj().T @ a2
    j3 = 0.5 * (number_op(space, 1).matrix - number_op(space, 2).matrix)
    for m in (jp, j3):
        m.setflags(write=False)
    jm = jp.conj().T
    jm.setflags(write=False)
    return jp, jm, j3


@lru_cache(maxsize=None)
def _su11_matrices(space: FockSpace):
    a1 = annihilator(space, 1).matrix
    a2 = annihilator(space, 2).matrix
    kp = a1.conj().T @ a2.conj().T
    km = kp.conj().T
    k3 = 0.5 * (
        number_op(space, 1).matrix
        + number_op(space, 2).matrix
        + np.eye(space.total_dim)
    )
    for m in (kp, km, k3):
        m.setflags(write=False)
    return kp, km, k3


def _is_antihermitian(m: np.ndarray) -> bool:
    scale = max(np.abs(m).max(), 1.0)
    return np.abs(m + m.conj().T).max() <= _ANTIHERM_RTOL * scale


def _eigh_antihermitian(m: np.ndarray, sectors=None):
    """Eigendecomposition m = q @ diag(-1j*w) @ q† of an anti-hermitian matrix."""
    h = 1j * m
    h = 0.5 * (h + h.conj().T)
    if sectors is None:
        return np.linalg.eigh(h)
    w = np.empty(m.shape[0])
    q = np.zeros_like(m)
    for idx in sectors:
        ws, qs = np.linalg.eigh(h[np.ix_(idx, idx)])
        w[idx] = ws
        q[np.ix_(idx, idx)] = qs
    return w, q


def _expm_antihermitian(m: np.ndarray, sectors=None) -> np.ndarray:
    w, q = _eigh_antihermitian(m, sectors)
    return (q * np.exp(-1j * w)) @ q.conj().T


def _expm_general(m: np.ndarray, sectors=None) -> np.ndarray:
    if sectors is None:
        return scipy.linalg.expm(m)
    out = np.zeros_like(m, dtype=complex)
    for idx in sectors:
        out[np.ix_(idx, idx)] = scipy.linalg.expm(m[np.ix_(idx, idx)])
    return out


def matrix_exp(x: FockOperator) -> FockOperator:
    """e^X.  Anti-hermitian inputs give an exactly unitary result."""
    m = x.matrix
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix_exp requires finite entries")
    if _is_antihermitian(m):
        return FockOperator(_expm_antihermitian(m), x.space)
    return FockOperator(_expm_general(m), x.space)


def expm_and_directional_derivative(
    x: np.ndarray,
    direction: np.ndarray,
    sectors=None,
    method: str = "spectral",
) -> tuple[np.ndarray, np.ndarray]:
    """exp(x) together with its exact derivative along `direction`.

    Both methods compute the same object, the off-diagonal block of
    exp([[X, E], [0, X]]):

    - "spectral" (anti-hermitian x only): divided differences of e^lambda on
      the eigenbasis of x.  Exact, and cheap enough for repeated use.
    - "block": exponentiate the literal 2n x 2n block matrix.  Kept as the
      independent reference implementation.
    """
    if method == "block":
        n = x.shape[0]
        aug = np.zeros((2 * n, 2 * n), dtype=complex)
        aug[:n, :n] = x
        aug[n:, n:] = x
        aug[:n, n:] = direction
        big = scipy.linalg.expm(aug)
        return big[:n, :n], big[:n, n:]
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    if not _is_antihermitian(x):
        raise ValueError("spectral method requires an anti-hermitian exponent")
    w, q = _eigh_antihermitian(x, sectors)
    # Eigenvalues of x are -1j*w; the first divided difference of exp is
    # exp(mean) * sin(half gap)/(half gap), stable for close eigenvalues.
    mean = 0.5 * (w[:, None] + w[None, :])
    half = 0.5 * (w[:, None] - w[None, :])
    phi = np.exp(-1j * mean) * np.sinc(half / np.pi)
    e = (q * np.exp(-1j * w)) @ q.conj().T
    deriv = q @ (phi * (q.conj().T @ direction @ q)) @ q.conj().T
    return e, deriv


def rotation_amount(xi: complex) -> complex:
    """Argument of the leading factor in the disentangled beam-splitter form."""
    r = abs(xi)
    if r >= math.pi / 2:
        raise ParameterDomainError(
            f"|xi| = {r:.6g} >= pi/2: disentangled form diverges"
        )
    return xi * tan_ratio(r)


def squeeze_amount(zeta: complex) -> complex:
    """Argument of the leading factor in the disentangled squeezing form."""
    return zeta * tanh_ratio(abs(zeta))


def u_op(space: FockSpace, xi: complex) -> FockOperator:
    """Direct exponential exp(xi a1†a2 - conj(xi) a2†a1); exactly unitary."""
    jp, jm, _ = _su2_matrices(space)
    m = xi * jp - np.conj(xi) * jm
    return FockOperator(
        _expm_antihermitian(m, total_number_sectors(space)), space
    )


def v_op(space: FockSpace, zeta: complex) -> FockOperator:
    """Direct exponential exp(zeta a1†a2† - conj(zeta) a2 a1).

    Unitary on the truncated space; faithful to the untruncated operator on
    low-lying states only while tanh(|zeta|)^(cutoff+1) stays negligible.
    """
    kp, km, _ = _su11_matrices(space)
    m = zeta * kp - np.conj(zeta) * km
    return FockOperator(
        _expm_antihermitian(m, mode_difference_sectors(space)), space
    )


def u_disentangled(space: FockSpace, xi: complex) -> FockOperator:
    """Normal-ordered product form of u_op, valid for |xi| < pi/2."""
    eta = rotation_amount(xi)
    jp, jm, j3 = _su2_matrices(space)
    sectors = total_number_sectors(space)
    left = _expm_general(eta * jp, sectors)
    mid = np.diag(np.exp(math.log1p(abs(eta) ** 2) * np.diag(j3)))
    right = _expm_general(-np.conj(eta) * jm, sectors)
    return FockOperator(left @ mid @ right, space)


def v_disentangled(space: FockSpace, zeta: complex) -> FockOperator:
    """Normal-ordered product form of v_op.

    Agrees with v_op on low-lying states within the truncation tolerance of
    the configured cutoff/budget pairing.
    """
    kappa = squeeze_amount(zeta)
    kp, km, k3 = _su11_matrices(space)
    sectors = mode_difference_sectors(space)
    left = _expm_general(kappa * kp, sectors)
    mid = np.diag(np.exp(math.log1p(-abs(kappa) ** 2) * np.diag(k3)))
    right = _expm_general(-np.conj(kappa) * km, sectors)
    return FockOperator(left @ mid @ right, space)
