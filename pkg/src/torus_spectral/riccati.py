"""Perturbed Riccati map, its derivative, curvature maps and the estimate suite.

The map sends a zero-mean profile ``q`` to the zero-mean potential

    P(q) = q' + alpha q^2 + u - c0,   u = A exp(-beta Q),   Q(x) = int_0^x q,
    c0 = int_0^1 (alpha q^2 + u),

and with ``alpha = 1``, ``beta = 4/m``, ``A = E_nu / r0^2`` it is the potential
of the Schroedinger operator unitarily equivalent to the transversal mode
``-Delta_nu`` of the warped torus (shifted by ``c0``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    PeriodicFn,
    antiderivative_zero_start,
    norm,
    require_zero_mean,
)


@dataclass(frozen=True)
class RiccatiParams:
    """General parameters ``(alpha, beta, A)`` of the perturbed Riccati map."""

    alpha: float = 1.0
    beta: float = 4.0
    A: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.A < 0:
            raise ValueError("need alpha > 0, beta > 0, A >= 0")

    @property
    def c_star(self) -> float:
        return self.A * (self.beta + self.alpha) * (2.0 + self.beta * self.A)


@dataclass(frozen=True)
class OperatorSpec:
    """Transversal mode data ``(m, E_nu, r0)`` of the torus Laplacian."""

    m: int = 1
    E_nu: float = 0.0
    r0: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.r0 <= 0:
            raise ValueError("r0 must be positive")
        if self.E_nu < 0:
            raise ValueError("E_nu must be nonnegative")

    @property
    def A(self) -> float:
        return self.E_nu / self.r0**2

    @property
    def beta(self) -> float:
        return 4.0 / self.m

    @property
    def alpha(self) -> float:
        return 1.0

    @property
    def h0(self) -> float:
        return float(np.sqrt(self.A))

    @property
    def params(self) -> RiccatiParams:
        return RiccatiParams(self.alpha, self.beta, self.A)

    @property
    def c_star(self) -> float:
        return self.params.c_star


@dataclass(frozen=True)
class RiccatiOutput:
    p: PeriodicFn
    c0: float
    u: PeriodicFn
    Q: PeriodicFn


def forward_map(q: PeriodicFn, spec) -> RiccatiOutput:
    """Evaluate the perturbed Riccati map; ``spec`` is an OperatorSpec or RiccatiParams."""
    require_zero_mean(q, "q")
    Q = antiderivative_zero_start(q)
    u = PeriodicFn(spec.A * np.exp(-spec.beta * Q.samples))
    f = spec.alpha * q * q + u
    c0 = f.mean
    p = q.derivative() + f - c0
    # remove the O(eps) mean left by the FFT derivative
    p = p - p.mean
    return RiccatiOutput(p=p, c0=c0, u=u, Q=Q)


def frechet_apply(q: PeriodicFn, f: PeriodicFn, spec) -> PeriodicFn:
    """Directional derivative ``dP(q)[f]``.

    ``f' + 2 alpha q f - beta u J f - int(2 alpha q f - beta u J f)`` with
    ``J f = int_0^x f``.
    """
    require_zero_mean(q, "q")
    require_zero_mean(f, "direction")
    Q = antiderivative_zero_start(q)
    u = PeriodicFn(spec.A * np.exp(-spec.beta * Q.samples))
    Jf = antiderivative_zero_start(f)
    g = 2.0 * spec.alpha * q * f - spec.beta * u * Jf
    out = f.derivative() + g - g.mean
    return out - out.mean


def gauss_curvature(q: PeriodicFn) -> PeriodicFn:
    """Gaussian curvature ``G = -r''/r = -v' - v^2`` of the surface, ``v = 2q``."""
    v = 2.0 * q
    return -v.derivative() - v * v


def gauss_split(q: PeriodicFn) -> tuple[float, PeriodicFn]:
    """``(G0, G1)`` with ``G0 = int G`` and ``G1 = G - G0`` of zero mean."""
    G = gauss_curvature(q)
    g0 = G.mean
    return g0, G - g0


def ricci_eigenvalues(q: PeriodicFn, spec: OperatorSpec, kappa: float) -> tuple[PeriodicFn, PeriodicFn]:
    """Axial and transversal Ricci eigenvalues of the warped product.

    Returns ``E = -v' - v^2/m`` and ``e1 = kappa/r^2 - (v' + v^2)/m`` with
    ``v = 2q`` and ``r = r0 exp(2Q/m)``.
    """
    require_zero_mean(q, "q")
    m = spec.m
    v = 2.0 * q
    dv = v.derivative()
    v2 = v * v
    Q = antiderivative_zero_start(q)
    r = spec.r0 * np.exp(2.0 * Q.samples / m)
    axial = -dv - v2 / m
    transversal = PeriodicFn(kappa / r**2) - (dv + v2) / m
    return axial, transversal


def ricci_split(q: PeriodicFn, m: int) -> tuple[float, PeriodicFn]:
    """Constant and zero-mean parts of the axial Ricci eigenvalue."""
    require_zero_mean(q, "q")
    v = 2.0 * q
    v2 = v * v
    e0 = -v2.mean / m
    e1 = -v.derivative() - v2 / m + v2.mean / m
    return e0, e1 - e1.mean


# ----------------------------------------------------------------------------
# estimate suite

IDENTITY_RTOL = 1e-8


@dataclass
class EstimateRow:
    name: str
    lhs: float
    rhs: float
    kind: str  # "identity" or "bound" (lhs <= rhs)
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if self.kind == "identity":
            scale = max(abs(self.lhs), abs(self.rhs), 1e-300)
            return abs(self.lhs - self.rhs) <= IDENTITY_RTOL * scale or abs(self.lhs - self.rhs) < 1e-14
        # bounds tolerate roundoff at the equality case
        return self.lhs <= self.rhs + 1e-12 * max(1.0, abs(self.rhs))


@dataclass
class EstimateReport:
    rows: list[EstimateRow] = field(default_factory=list)

    def add(self, name, lhs, rhs, kind="bound", note=""):
        self.rows.append(EstimateRow(name, float(lhs), float(rhs), kind, note))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def __getitem__(self, name: str) -> EstimateRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self) -> list[EstimateRow]:
        return [r for r in self.rows if not r.passed]

    def table(self) -> list[tuple]:
        return [(r.name, r.lhs, r.rhs, r.slack, r.passed) for r in self.rows]

    def __str__(self) -> str:
        lines = [f"{'name':<14}{'lhs':>16}{'rhs':>16}{'slack':>14}  pass"]
        for r in self.rows:
            lines.append(f"{r.name:<14}{r.lhs:16.8e}{r.rhs:16.8e}{r.slack:14.3e}  {r.passed}")
        return "\n".join(lines)


def _riccati_rows(report: EstimateReport, q: PeriodicFn, prm, suffix: str = "") -> None:
    a, b, A = prm.alpha, prm.beta, prm.A
    out = forward_map(q, prm)
    P, u, c0 = out.p, out.u, out.c0
    nq, ndq, nP = norm(q), norm(q, 1), norm(P)
    q2 = q * q
    h = a * q2 + u - c0
    q2u = q2.inner(u)
    report.add("energy_identity" + suffix, nP**2, ndq**2 + norm(h) ** 2 + 2 * b * q2u, "identity")
    report.add(
        "energy_identity_expanded" + suffix,
        nP**2,
        ndq**2 + a**2 * norm(q2) ** 2 + norm(u) ** 2 + 2 * (b + a) * q2u - c0**2,
        "identity",
    )
    bound = ndq**2 + 2 * a**2 * nq**3 * ndq + prm.c_star * nq**2 * np.exp(2 * b * nq)
    report.add("energy_upper" + suffix, nP**2, bound)
    report.add("derivative_lower" + suffix, ndq, nP)
    report.add("weak_norm_upper" + suffix, norm(P, -1), nq * (3 + 2 * a * nq + b * A * np.exp(b * nq)))


def estimate_report(q: PeriodicFn, spec) -> EstimateReport:
    """Evaluate the a-priori identities and two-sided estimates for ``q``.

    Besides the rows for ``spec`` itself, the ``A = 0`` companion map is
    evaluated to check the pure Riccati identity and bound (rows ``free_*``).
    """
    require_zero_mean(q, "q")
    prm = spec.params if isinstance(spec, OperatorSpec) else spec
    report = EstimateReport()
    _riccati_rows(report, q, prm)

    free = RiccatiParams(prm.alpha, prm.beta, 0.0)
    P0 = forward_map(q, free).p
    ndq = norm(q, 1)
    q2 = q * q
    c00 = prm.alpha * norm(q) ** 2
    report.add("free_energy_identity", norm(P0) ** 2, ndq**2 + prm.alpha**2 * norm(q2) ** 2 - c00**2, "identity")
    report.add("free_energy_upper", norm(P0) ** 2, ndq**2 + prm.alpha**2 * norm(q2) ** 2)
    report.add("free_derivative_lower", ndq**2, norm(P0) ** 2)

    m = spec.m if isinstance(spec, OperatorSpec) else int(round(4.0 / prm.beta))
    if isinstance(spec, OperatorSpec) and m == 1:
        z = norm(forward_map(q, prm).p, -1)
        report.add("profile_by_weak_norm", norm(q) ** 2, 2 * z**2 * (1 + 2 * z**2))

    # Ricci / Minkowski rows
    v = 2.0 * q
    nv, ndv = norm(v), norm(v, 1)
    e0, e1 = ricci_split(q, m)
    ne1 = norm(e1)
    report.add("ricci_identity", ne1**2, ndv**2 + norm(v * v) ** 2 / m**2 - e0**2, "identity")
    report.add("ricci_lower", ndv**2, ne1**2)
    report.add("ricci_upper", ne1**2, ndv**2 + nv**2 * ndv**2 / m**2 - nv**4 / m**2)
    return report
