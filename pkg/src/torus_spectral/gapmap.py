"""Gap-length coordinates of spectral data and the mapping-level estimates.

For each gap ``gamma_n = [lam_n^-, lam_n^+]`` with Dirichlet eigenvalue ``mu_n``
and norming constant ``kappa_n``:

    psi_n1 = (lam_n^- + lam_n^+)/2 - mu_n
    psi_n2 = sign(kappa_n) * | |gamma_n|^2/4 - psi_n1^2 |^(1/2)

so that ``psi_n1^2 + psi_n2^2 = |gamma_n|^2/4``. The pair is unchanged when the
potential is shifted by a constant, so the impedance form (spectrum shifted
by ``c0``) and the Schroedinger form give the same vector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hill
from .core import PeriodicFn, even_odd_split, norm, require_zero_mean, weighted_l2_norm
from .riccati import EstimateReport, OperatorSpec, forward_map

DEFAULT_N = 12
ZERO_CLAMP = 1e-9
# |kappa_n| below this is roundoff: mu_n sits on a gap edge and psi_n2 = 0.
# Near an edge psi_n2 ~ |kappa_n| |gamma_n|^(1/2) / |Lambda'|^(1/2), so the cut
# costs far less than the sqrt-amplified noise of the edge differences.
KAPPA_ZERO = 1e-10


@dataclass
class GapVector:
    """Entries ``(psi_n1, psi_n2)`` for ``n = 1..N``, shape ``(N, 2)``."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float).reshape(-1, 2)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    @property
    def psi1(self) -> np.ndarray:
        return self.entries[:, 0]

    @property
    def psi2(self) -> np.ndarray:
        return self.entries[:, 1]

    def norm(self, j: int = 0) -> float:
        return weighted_l2_norm(self, j)

    def flat(self) -> np.ndarray:
        return self.entries.ravel().copy()

    @classmethod
    def zeros(cls, N: int) -> GapVector:
        return cls(np.zeros((N, 2)))


def gap_vector(data: hill.SpectralData) -> GapVector:
    """Assemble the gap coordinates from computed spectral data."""
    lm, lp = data.band_edges[:, 0], data.band_edges[:, 1]
    half = 0.5 * (lp - lm)
    closed = half == 0.0
    psi1 = 0.5 * (lm + lp) - data.dirichlet
    psi1[closed] = 0.0
    # mu_n lies in the gap, so the radicand is >= 0 up to noise
    rad = np.abs(half**2 - psi1**2)
    kappa = np.where(np.abs(data.norming) < KAPPA_ZERO, 0.0, data.norming)
    psi2 = np.sign(kappa) * np.sqrt(rad)
    psi2[np.abs(psi2) < ZERO_CLAMP] = 0.0
    return GapVector(np.column_stack([psi1, psi2]))


def psi_cap_of_p(p: PeriodicFn, N: int = DEFAULT_N) -> GapVector:
    """Gap coordinates of ``-d^2/dx^2 + p``."""
    return gap_vector(hill.spectral_data(p, N))


def psi_of_q(q: PeriodicFn, spec: OperatorSpec, N: int = DEFAULT_N, backend: str = "impedance") -> GapVector:
    """Gap coordinates of the transversal mode with profile ``q``.

    ``backend="impedance"`` solves the impedance form directly;
    ``"schrodinger"`` goes through the potential ``P(q)``.
    """
    require_zero_mean(q, "q")
    if backend == "impedance":
        return gap_vector(hill.spectral_data(hill.impedance(q, spec), N))
    if backend == "schrodinger":
        return psi_cap_of_p(forward_map(q, spec).p, N)
    raise ValueError(f"unknown backend {backend!r}")


def psi_even(q: PeriodicFn, spec: OperatorSpec, N: int = DEFAULT_N, tol: float = 1e-10) -> np.ndarray:
    """``psi_n = (lam_n^- + lam_n^+)/2 - mu_n`` for an odd profile ``q``."""
    even, _ = even_odd_split(q)
    if np.max(np.abs(even.samples)) > tol:
        raise ValueError("psi_even needs an odd profile q(1 - x) = -q(x)")
    return psi_of_q(q, spec, N).psi1.copy()


def tail_estimate(p: PeriodicFn, N: int) -> float:
    """Crude ``(sum_{n > N} |gamma_n|^2 / 4)^(1/2)`` from ``|gamma_n| ~ 2 |p_hat(n)|``."""
    c = np.abs(p.coeffs[N + 1: p.grid_size // 2])
    return float(np.sqrt(np.sum(c**2)))


def mapping_estimates(q: PeriodicFn, spec: OperatorSpec, N: int = DEFAULT_N,
                      psi: GapVector | None = None) -> EstimateReport:
    """Two-sided estimates between ``q``, ``p = P(q)`` and ``psi(q)``.

    Lower bounds on ``||psi||`` use the truncated vector (conservative); upper
    bounds on ``||psi||`` add the tail estimate.
    """
    require_zero_mean(q, "q")
    p = forward_map(q, spec).p
    if psi is None:
        psi = psi_cap_of_p(p, N)
    tail = tail_estimate(p, psi.N)
    nq, ndq, np_ = norm(q), norm(q, 1), norm(p)
    beta, A = spec.beta, spec.A
    psi0 = psi.norm(0)
    psi0_full = np.hypot(psi0, tail)
    n = np.arange(psi.N + 1, p.grid_size // 2)
    tail_m1 = float(np.sqrt(np.sum((np.abs(p.coeffs[n]) / (2 * np.pi * n)) ** 2)))
    psim1 = psi.norm(-1)
    psim1_full = np.hypot(psim1, tail_m1)

    rep = EstimateReport()
    rep.add("potential_lower", ndq, np_)
    rep.add("potential_by_gaps", np_, 2 * psi0 * (1 + psi0 ** (1 / 3)))
    w = ndq + nq * (ndq + np.sqrt(spec.c_star) * np.exp(beta * nq))
    rep.add("gaps_by_profile", psi0_full, w * (1 + w ** (1 / 3)), note=f"tail={tail:.3e}")
    rep.add("gaps_by_potential", psi0_full, np_ * (1 + np_ ** (1 / 3)))
    z = norm(p, -1)
    rep.add("weak_gaps_by_weak_norm", psim1_full, z * (1 + 2 * z) ** 3, note=f"tail={tail_m1:.3e}")
    rep.add("weak_norm_by_profile", z, nq * (3 + 2 * nq + beta * A * np.exp(beta * nq)))
    if spec.m == 1:
        rep.add("profile_by_weak_norm", nq**2, 2 * z**2 * (1 + 2 * z**2))
        rep.add("weak_norm_by_weak_gaps", z, 96 * np.pi**2 * psim1 * (1 + 2 * psim1) ** 3)
    return rep
