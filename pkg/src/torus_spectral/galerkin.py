"""Spectral Galerkin eigenvalues of ``-d^2/dx^2 + p``; an oracle independent of shooting.

Periodic and antiperiodic problems use exponential bases (integer and
half-integer modes), where the matrix is exact up to the band limit of ``p``.
The Dirichlet problem uses the sine basis ``sqrt(2) sin(n pi x)``; its
matrix entries need cosine moments of ``p`` over half-periods, which decay
only algebraically, so the truncation must be generous.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import eigvalsh, toeplitz

from .core import PeriodicFn


def _fourier(p: PeriodicFn, kmax: int) -> np.ndarray:
    """``c[k + kmax] = p_hat(k)`` for ``|k| <= kmax`` (zero beyond the grid band)."""
    return np.array([p.coefficient(k) for k in range(-kmax, kmax + 1)])


def _exponential_matrix(p: PeriodicFn, freqs: np.ndarray) -> np.ndarray:
    # H_{kl} = freq_k^2 delta_kl + p_hat(k - l); p_hat index difference is integer
    n = freqs.size
    c = _fourier(p, n - 1)
    col = c[n - 1:]  # p_hat(0), p_hat(1), ...
    row = c[n - 1::-1]  # p_hat(0), p_hat(-1), ...
    H = toeplitz(col, row).astype(complex)
    H[np.diag_indices(n)] += freqs**2
    return H


def cosine_moments(p: PeriodicFn, kmax: int) -> np.ndarray:
    """``C_k = int_0^1 p(x) cos(k pi x) dx`` for ``k = 0..kmax``, from Fourier data.

    Even ``k = 2j`` give ``Re p_hat(j)``; odd ``k`` sum ``-8 j Im p_hat(j) / (pi (4 j^2 - k^2))``.
    """
    M = p.grid_size
    jmax = M // 2
    j = np.arange(1, jmax + 1)
    ph = np.array([p.coefficient(int(i)) for i in j])
    out = np.zeros(kmax + 1)
    for k in range(kmax + 1):
        if k % 2 == 0:
            out[k] = p.mean if k == 0 else (p.coefficient(k // 2).real if k // 2 <= jmax else 0.0)
        else:
            out[k] = np.sum(-8.0 * j * ph.imag / (np.pi * (4.0 * j**2 - k**2)))
    return out


def galerkin_matrix(p: PeriodicFn, dim: int, bc: str) -> np.ndarray:
    if bc == "periodic":
        k = np.arange(dim) - dim // 2
        return _exponential_matrix(p, 2.0 * np.pi * k)
    if bc == "antiperiodic":
        k = np.arange(dim) - dim // 2
        return _exponential_matrix(p, np.pi * (2 * k + 1))
    if bc == "dirichlet":
        C = cosine_moments(p, 2 * dim + 2)
        n = np.arange(1, dim + 1)
        H = C[np.abs(n[:, None] - n[None, :])] - C[n[:, None] + n[None, :]]
        H[np.diag_indices(dim)] += (np.pi * n) ** 2
        return H
    raise ValueError(f"unknown boundary condition {bc!r}")


def galerkin_spectrum(p: PeriodicFn, N: int, bc: str = "periodic", dim: int | None = None) -> np.ndarray:
    """First ``N`` eigenvalues (ascending) of the truncated Galerkin matrix.

    ``dim`` defaults to ``max(4N + 32, 2 * band)`` for exponential bases and
    to 1024 for the sine basis.
    """
    if dim is None:
        if bc == "dirichlet":
            dim = max(4 * N + 32, 1024)
        else:
            dim = max(4 * N + 32, p.grid_size // 2)
    if dim < 4 * N + 32:
        raise ValueError("truncation dimension must be at least 4N + 32")
    H = galerkin_matrix(p, dim, bc)
    return eigvalsh(H, subset_by_index=[0, N - 1])
