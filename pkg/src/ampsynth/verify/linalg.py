"""Dense LU factorization with partial pivoting for small complex systems."""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ArithmeticError):
    pass


def lu_factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(lu, perm)`` with ``a[perm] == L @ U``.

    L (unit diagonal) and U are packed into one array, row-major elimination.
    """
    lu = np.array(a, dtype=complex, copy=True)
    n = lu.shape[0]
    if lu.shape != (n, n):
        raise ValueError("matrix must be square")
    perm = np.arange(n)
    scale = np.abs(lu).max() if n else 0.0
    tiny = 1e-18 * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tiny:
            raise SingularMatrixError(f"zero pivot in column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm


def lu_solve(factors: tuple[np.ndarray, np.ndarray], b: np.ndarray) -> np.ndarray:
    lu, perm = factors
    n = lu.shape[0]
    y = np.array(b, dtype=complex)[perm]
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
    return y


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return lu_solve(lu_factor(a), b)
