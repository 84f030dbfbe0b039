"""Pure-NumPy fallback for the path-ordered product kernel.

Same contract as the compiled extension: given a stack of anti-hermitian
4x4 increments M_k, return exp(M_{N-1}) @ ... @ exp(M_1) @ exp(M_0).
Factors come from a batched eigendecomposition, the ordered product from a
pairwise reduction that preserves factor order.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def ordered_expm_product(increments: np.ndarray) -> np.ndarray:
    incs = np.asarray(increments, dtype=complex)
    if incs.ndim != 3 or incs.shape[1:] != (4, 4):
        raise ValueError(f"expected (N, 4, 4) increments, got {incs.shape}")
    if incs.shape[0] == 0:
        return np.eye(4, dtype=complex)
    herm = 1j * incs
    herm = 0.5 * (herm + herm.conj().swapaxes(1, 2))
    w, q = np.linalg.eigh(herm)
    factors = (q * np.exp(-1j * w)[:, None, :]) @ q.conj().swapaxes(1, 2)
    while factors.shape[0] > 1:
        n = factors.shape[0]
        paired = factors[1 : 2 * (n // 2) : 2] @ factors[0 : 2 * (n // 2) : 2]
        if n % 2:
            paired = np.concatenate([paired, factors[-1:]], axis=0)
        factors = paired
    return np.ascontiguousarray(factors[0])
