"""Shooting solver for periodic Sturm-Liouville problems on [0, 1].

Both operator forms are written as the first-order system

    y' = a(x) z,    z' = (b(x) - lam w(x)) y,

Schroedinger form ``-y'' + p y = lam y`` is ``a = w = 1, b = p``; impedance form
``-(rho^2 f')'/rho^2 + V f = lam f`` is ``y = f, z = rho^2 f'`` with
``a = rho^-2, b = rho^2 V, w = rho^2``.

The system is propagated with the fourth-order Magnus integrator on Gauss
nodes. Each step is an exact 2x2 matrix exponential, so the Wronskian is kept
to roundoff and accuracy is uniform in ``lam``. Step products are reduced
pairwise (monodromy only) or with a prefix scan (whole paths, Pruefer angles),
vectorized over arrays of ``lam``.

Band edges are bracketed with Dirichlet and Neumann eigenvalues, both of which
are found by Pruefer-angle counting, so every root is index-correct even when a
gap is closed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .core import PeriodicFn, antiderivative_zero_start, require_zero_mean

MIN_STEPS = 512
CLOSED_GAP = 1e-9
ROOT_XTOL = 1e-14
_G = np.sqrt(3.0) / 6.0


class SpectralError(RuntimeError):
    """Root bracketing or integration failed."""


class DegenerateEigenvalueError(SpectralError):
    """The requested eigenvalue is (numerically) double."""


@dataclass(frozen=True)
class Monodromy:
    """Fundamental pair at ``x = 1``: ``theta(0)=1, theta'(0)=0, phi(0)=0, phi'(0)=1``.

    For the impedance form the primed entries hold ``rho^2 f'``.
    Entries are floats or arrays matching the shape of ``lam``.
    """

    theta1: np.ndarray
    theta1p: np.ndarray
    phi1: np.ndarray
    phi1p: np.ndarray

    @property
    def discriminant(self):
        return 0.5 * (self.theta1 + self.phi1p)

    @property
    def det(self):
        return self.theta1 * self.phi1p - self.theta1p * self.phi1

    def matrix(self) -> np.ndarray:
        return np.array([[self.theta1, self.phi1], [self.theta1p, self.phi1p]], dtype=float)


def _as_fn(f, like: PeriodicFn) -> PeriodicFn:
    if f is None:
        return PeriodicFn(np.ones(like.grid_size))
    return f


class SturmLiouville:
    """Coefficients ``(a, b, w)`` of ``y' = a z, z' = (b - lam w) y``.

    ``a`` and ``w`` default to 1.
    """

    def __init__(self, b: PeriodicFn, a: PeriodicFn | None = None, w: PeriodicFn | None = None,
                 min_steps: int = MIN_STEPS, kind: str = "schrodinger"):
        self.b = b
        self.a = _as_fn(a, b)
        self.w = _as_fn(w, b)
        if np.any(self.a.samples <= 0) or np.any(self.w.samples <= 0):
            raise ValueError("a and w must be positive")
        self.grid_size = b.grid_size
        self.min_steps = max(int(min_steps), self.grid_size)
        self.kind = kind
        self._node_cache: dict[int, tuple] = {}
        sa, sb, sw = self.a.samples, self.b.samples, self.w.samples
        self._amax = float(sa.max())
        self._bmax = float(np.abs(sb).max())
        self._wmax = float(sw.max())
        # eigenvalues of every boundary problem lie above min(b/w)
        self.lower_bound = float((sb / sw).min())
        # optical length int sqrt(w/a); Weyl scale for the eigenvalue count
        self.optical_length = float(np.mean(np.sqrt(sw / sa)))

    # -- stepping --------------------------------------------------------
    def n_steps(self, lam) -> int:
        lam_max = float(np.max(np.abs(lam))) if np.size(lam) else 0.0
        scale = np.sqrt(self._amax * (self._bmax + lam_max * self._wmax))
        n = self.min_steps
        while scale / n > 0.25:
            n *= 2
        return n

    def _nodes(self, n: int):
        if n not in self._node_cache:
            h = 1.0 / n
            x = np.arange(n) * h
            x1, x2 = x + (0.5 - _G) * h, x + (0.5 + _G) * h
            vals = tuple(f(xx)[:, None] for f in (self.a, self.b, self.w) for xx in (x1, x2))
            self._node_cache[n] = vals
        return self._node_cache[n]

    def step_matrices(self, lam, n: int | None = None):
        """Per-step propagators ``(e11, e12, e21, e22)``, each of shape ``(n, len(lam))``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))[None, :]
        if n is None:
            n = self.n_steps(lam)
        h = 1.0 / n
        a1, a2, b1, b2, w1, w2 = self._nodes(n)
        c1 = b1 - lam * w1
        c2 = b2 - lam * w2
        d = (np.sqrt(3.0) * h * h / 12.0) * (a2 * c1 - a1 * c2)
        upper = 0.5 * h * (a1 + a2)
        lower = 0.5 * h * (c1 + c2)
        om2 = d * d + upper * lower
        om = np.sqrt(np.abs(om2))
        pos = om2 >= 0
        ch = np.where(pos, np.cosh(om), np.cos(om))
        safe = np.where(om > 1e-8, om, 1.0)
        sh = np.where(pos, np.sinh(om), np.sin(om)) / safe
        # series for sinh(om)/om near zero; om2 carries the sign
        sh = np.where(om > 1e-8, sh, 1.0 + om2 / 6.0)
        return ch + sh * d, sh * upper, sh * lower, ch - sh * d

    def monodromy(self, lam) -> Monodromy:
        scalar = np.ndim(lam) == 0
        a, b, c, d = self.step_matrices(lam)
        while a.shape[0] > 1:
            a0, b0, c0, d0 = a[0::2], b[0::2], c[0::2], d[0::2]
            a1, b1, c1, d1 = a[1::2], b[1::2], c[1::2], d[1::2]
            a, b, c, d = (a1 * a0 + b1 * c0, a1 * b0 + b1 * d0,
                          c1 * a0 + d1 * c0, c1 * b0 + d1 * d0)
        out = [v[0] for v in (a, b, c, d)]
        if scalar:
            out = [float(v[0]) for v in out]
        return Monodromy(theta1=out[0], phi1=out[1], theta1p=out[2], phi1p=out[3])

    def paths(self, lam, n: int | None = None):
        """Fundamental matrix at every step boundary ``x_j = j/n``, ``j = 0..n``.

        Returns ``(x, (m11, m12, m21, m22))`` with entries of shape ``(n+1, len(lam))``.
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if n is None:
            n = self.n_steps(lam)
        a, b, c, d = (np.array(v) for v in self.step_matrices(lam, n))
        k = 1
        while k < n:
            # inclusive scan: M_i <- M_i @ M_{i-k}
            a0, b0, c0, d0 = a[:-k], b[:-k], c[:-k], d[:-k]
            a1, b1, c1, d1 = a[k:], b[k:], c[k:], d[k:]
            na = a1 * a0 + b1 * c0
            nb = a1 * b0 + b1 * d0
            nc = c1 * a0 + d1 * c0
            nd = c1 * b0 + d1 * d0
            a[k:], b[k:], c[k:], d[k:] = na, nb, nc, nd
            k *= 2
        one = np.ones((1, lam.size))
        zer = np.zeros((1, lam.size))
        entries = (np.vstack([one, a]), np.vstack([zer, b]),
                   np.vstack([zer, c]), np.vstack([one, d]))
        return np.linspace(0.0, 1.0, n + 1), entries

    def prufer_angles(self, lam):
        """Unwrapped ``atan2(y, z)`` at ``x = 1`` for both fundamental columns.

        The Neumann column ``(1, 0)`` starts at ``pi/2``, the Dirichlet column
        ``(0, 1)`` at 0; both angles increase with ``lam``.
        """
        _, (m11, m12, m21, m22) = self.paths(lam)
        t1 = np.unwrap(np.arctan2(m11, m21), axis=0)[-1]
        t2 = np.unwrap(np.arctan2(m12, m22), axis=0)[-1]
        return t1, t2

    def discriminant(self, lam):
        return self.monodromy(lam).discriminant


# ----------------------------------------------------------------------------
# operator builders


def schrodinger(p: PeriodicFn, min_steps: int = MIN_STEPS) -> SturmLiouville:
    """``-y'' + p y = lam y``."""
    return SturmLiouville(p, min_steps=min_steps, kind="schrodinger")


def impedance(q: PeriodicFn, spec, min_steps: int = MIN_STEPS) -> SturmLiouville:
    """Transversal mode ``-(rho^2 f')'/rho^2 + (E_nu/r^2) f`` of the warped torus.

    ``r = r0 exp(2Q/m)`` and ``rho = r^(m/2) = r0^(m/2) exp(Q)``.
    """
    require_zero_mean(q, "q")
    Q = antiderivative_zero_start(q).samples
    m = spec.m
    rho2 = spec.r0**m * np.exp(2.0 * Q)
    r2 = spec.r0**2 * np.exp(4.0 * Q / m)
    potential = spec.E_nu / r2
    return SturmLiouville(PeriodicFn(rho2 * potential), a=PeriodicFn(1.0 / rho2),
                          w=PeriodicFn(rho2), min_steps=min_steps, kind="impedance")


def _operator(p_or_op) -> SturmLiouville:
    if isinstance(p_or_op, SturmLiouville):
        return p_or_op
    if isinstance(p_or_op, PeriodicFn):
        return schrodinger(p_or_op)
    raise TypeError(f"expected PeriodicFn or SturmLiouville, got {type(p_or_op).__name__}")


def monodromy(p, lam) -> Monodromy:
    return _operator(p).monodromy(lam)


def discriminant(p, lam):
    """``Lambda(lam) = (theta(1) + phi'(1)) / 2``; vectorized over ``lam``."""
    return _operator(p).discriminant(lam)


def reference_monodromy(p, lam: float, rtol: float = 1e-13, atol: float = 1e-13) -> Monodromy:
    """Monodromy by adaptive 8th-order Runge-Kutta; slow, used as an oracle."""
    op = _operator(p)

    def rhs(x, s):
        a, b, w = op.a(x), op.b(x), op.w(x)
        c = b - lam * w
        return [a * s[1], c * s[0], a * s[3], c * s[2]]

    sol = solve_ivp(rhs, (0.0, 1.0), [1.0, 0.0, 0.0, 1.0], method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise SpectralError(sol.message)
    t, tp, f, fp = sol.y[:, -1]
    return Monodromy(theta1=t, theta1p=tp, phi1=f, phi1p=fp)


# ----------------------------------------------------------------------------
# Dirichlet / Neumann eigenvalues by angle counting


def _wrap(x):
    return (x + np.pi) % (2.0 * np.pi) - np.pi


def _sweep(op: SturmLiouville, target: float):
    """Tabulate both Pruefer angles on a lam grid until both exceed ``target``.

    Consecutive grid cells are refined until each spans less than ``pi`` in
    both angles, so a target crossing pins a unique root.
    """
    lo = op.lower_bound - 1.0
    ds = 0.5 / op.optical_length
    s_max = (target / np.pi + 2.0) * np.pi / op.optical_length
    for _ in range(60):
        lam = lo + np.arange(0.0, s_max + ds, ds) ** 2
        t1, t2 = op.prufer_angles(lam)
        if t1[-1] > target and t2[-1] > target:
            break
        s_max *= 1.5
    else:
        raise SpectralError("eigenvalue sweep did not reach the requested index")
    if t2[0] >= np.pi or t1[0] >= np.pi:
        raise SpectralError("lower spectral bound violated in sweep")
    for _ in range(30):
        bad = (np.diff(t1) >= 0.9 * np.pi) | (np.diff(t2) >= 0.9 * np.pi)
        if not bad.any():
            break
        mids = 0.5 * (lam[:-1][bad] + lam[1:][bad])
        m1, m2 = op.prufer_angles(mids)
        order = np.argsort(np.concatenate([lam, mids]))
        lam = np.concatenate([lam, mids])[order]
        t1 = np.concatenate([t1, m1])[order]
        t2 = np.concatenate([t2, m2])[order]
    return lam, t1, t2


def _angle_root(op: SturmLiouville, lam, angles, target: float, column: int) -> float:
    i = int(np.searchsorted(angles, target))
    if i == 0 or i >= lam.size:
        raise SpectralError(f"no bracket for angle {target:.6g}")
    if angles[i] == target:
        return float(lam[i])

    def f(x):
        mo = op.monodromy(x)
        if column == 2:
            ang = np.arctan2(mo.phi1, mo.phi1p)
        else:
            ang = np.arctan2(mo.theta1, mo.theta1p)
        return float(_wrap(ang - target))

    return brentq(f, lam[i - 1], lam[i], xtol=ROOT_XTOL, maxiter=200)


@dataclass
class Separators:
    """Dirichlet ``mu_n`` (n = 1..K) and Neumann ``nu_k`` (k = 0..K)."""

    dirichlet: np.ndarray
    neumann: np.ndarray


def separators(p, K: int) -> Separators:
    op = _operator(p)
    if K < 1:
        raise ValueError("K must be >= 1")
    target = (K + 1) * np.pi
    lam, t1, t2 = _sweep(op, target)
    mu = np.array([_angle_root(op, lam, t2, n * np.pi, 2) for n in range(1, K + 1)])
    nu = np.array([_angle_root(op, lam, t1, 0.5 * np.pi + k * np.pi, 1) for k in range(K + 1)])
    return Separators(dirichlet=mu, neumann=nu)


def dirichlet_eigenvalues(p, N: int) -> np.ndarray:
    """First ``N`` Dirichlet eigenvalues ``mu_1 < ... < mu_N``."""
    op = _operator(p)
    lam, _, t2 = _sweep(op, (N + 0.5) * np.pi)
    return np.array([_angle_root(op, lam, t2, n * np.pi, 2) for n in range(1, N + 1)])


def neumann_eigenvalues(p, N: int) -> np.ndarray:
    """Neumann eigenvalues ``nu_0 < ... < nu_N`` (``z(0) = z(1) = 0``)."""
    op = _operator(p)
    lam, t1, _ = _sweep(op, (N + 1.0) * np.pi)
    return np.array([_angle_root(op, lam, t1, 0.5 * np.pi + k * np.pi, 1) for k in range(N + 1)])


def norming_constants(p, mu) -> np.ndarray:
    """``kappa_n = log |phi'(1, mu_n)|``."""
    op = _operator(p)
    mu = np.asarray(mu, dtype=float)
    if mu.size == 0:
        return np.zeros(0)
    d = np.abs(np.atleast_1d(op.monodromy(mu).phi1p))
    if np.any(d < 1e-14):
        raise SpectralError("phi'(1, mu) vanishes; mu is not a Dirichlet eigenvalue")
    return np.log(d)


# ----------------------------------------------------------------------------
# band edges


def edge_function(mo: Monodromy, sign: float) -> float:
    """``sign * Lambda - 1`` evaluated without cancellation near ``sign * Lambda = 1``.

    Unit determinant gives ``Lambda^2 - 1 = ((theta - phi')/2)^2 + theta' phi``,
    whose terms vanish linearly at a nearly closed gap, while ``Lambda - 1``
    itself has a near-double root there.
    """
    lam = sign * mo.discriminant
    if lam <= 0:
        return lam - 1.0
    half = 0.5 * (mo.theta1 - mo.phi1p)
    return (half * half + mo.theta1p * mo.phi1) / (lam + 1.0)


def _edge_root(op: SturmLiouville, n: int, lo: float, hi: float, inner: str) -> float:
    """Root of ``(-1)^n Lambda - 1`` in ``[lo, hi]``.

    ``inner`` names the endpoint lying in the gap closure, where the function is
    nonnegative; it is taken as the edge if the function is not positive there.
    """
    sign = 1.0 if n % 2 == 0 else -1.0

    def g(x):
        return edge_function(op.monodromy(x), sign)

    x_in = lo if inner == "lo" else hi
    g_in = g(x_in)
    # a separator sitting on the edge; the sign test is exact for the
    # cancellation-free edge function
    if g_in <= 0.0:
        return float(x_in)
    x_out = hi if inner == "lo" else lo
    g_out = g(x_out)
    if g_out > 0:
        raise SpectralError(f"band edge {n} not bracketed on [{lo:.12g}, {hi:.12g}]")
    return brentq(g, lo, hi, xtol=ROOT_XTOL, maxiter=200)


@dataclass
class SpectralData:
    """Periodic/antiperiodic edges, Dirichlet eigenvalues and norming constants up to ``N``."""

    lambda0: float
    band_edges: np.ndarray  # (N, 2): (lambda_n^-, lambda_n^+)
    dirichlet: np.ndarray
    norming: np.ndarray
    neumann: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def N(self) -> int:
        return len(self.dirichlet)

    @property
    def gap_lengths(self) -> np.ndarray:
        return self.band_edges[:, 1] - self.band_edges[:, 0]

    def shifted(self, c: float) -> SpectralData:
        return SpectralData(self.lambda0 + c, self.band_edges + c, self.dirichlet + c,
                            self.norming.copy(), self.neumann + c)

    def invariant_violations(self, tol: float = 1e-9) -> list[str]:
        """Interlacing and ``mu_n in gamma_n``; returns human-readable failures."""
        out = []
        lm, lp = self.band_edges[:, 0], self.band_edges[:, 1]
        if self.N and not self.lambda0 < lm[0]:
            out.append("lambda0 < lambda_1^- fails")
        if np.any(lp < lm - tol):
            out.append("lambda_n^- <= lambda_n^+ fails")
        if np.any(lm[1:] <= lp[:-1]):
            out.append("lambda_n^+ < lambda_{n+1}^- fails")
        bad = np.nonzero((self.dirichlet < lm - tol) | (self.dirichlet > lp + tol))[0]
        for i in bad:
            out.append(f"mu_{i + 1} outside gap")
        return out


def periodic_eigenvalues(p, N: int, seps: Separators | None = None):
    """``(lambda0^+, edges)`` with ``edges[n-1] = (lambda_n^-, lambda_n^+)``, n = 1..N.

    Even ``n`` are periodic, odd ``n`` antiperiodic eigenvalues. Closed gaps
    (width below 1e-9) are returned with both edges at the midpoint.
    """
    op = _operator(p)
    if seps is None or len(seps.dirichlet) < N + 1:
        seps = separators(op, N + 1)
    mu, nu = seps.dirichlet, seps.neumann

    def lo_sep(n):
        return max(mu[n - 1], nu[n])

    def hi_sep(n):
        return min(mu[n - 1], nu[n])

    lam0 = _edge_root(op, 0, nu[0], hi_sep(1), "lo")
    edges = np.zeros((N, 2))
    for n in range(1, N + 1):
        below = nu[0] if n == 1 else lo_sep(n - 1)
        minus = _edge_root(op, n, below, hi_sep(n), "hi")
        plus = _edge_root(op, n, lo_sep(n), hi_sep(n + 1), "lo")
        if plus - minus < CLOSED_GAP:
            mid = 0.5 * (plus + minus)
            minus = plus = mid
        edges[n - 1] = minus, plus
    return lam0, edges


def spectral_data(p, N: int) -> SpectralData:
    op = _operator(p)
    seps = separators(op, N + 1)
    lam0, edges = periodic_eigenvalues(op, N, seps)
    mu = seps.dirichlet[:N]
    return SpectralData(lambda0=lam0, band_edges=edges, dirichlet=mu.copy(),
                        norming=norming_constants(op, mu), neumann=seps.neumann[: N + 1].copy())


def edge_residuals(p, data: SpectralData) -> np.ndarray:
    """``|Lambda(lambda_n^pm) - (-1)^n|`` with row 0 holding ``lambda0``."""
    op = _operator(p)
    n = np.arange(1, data.N + 1)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    res = np.zeros((data.N + 1, 2))
    d0 = op.discriminant(data.lambda0)
    res[0] = abs(d0 - 1.0)
    res[1:, 0] = np.abs(op.discriminant(data.band_edges[:, 0]) - sign)
    res[1:, 1] = np.abs(op.discriminant(data.band_edges[:, 1]) - sign)
    return res


def eigenvalues(p, N: int, bc: str = "periodic") -> np.ndarray:
    """First ``N`` eigenvalues with multiplicity under ``bc``."""
    if bc == "dirichlet":
        return dirichlet_eigenvalues(p, N)
    if bc == "neumann":
        return neumann_eigenvalues(p, N - 1)
    if bc not in ("periodic", "antiperiodic"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    n_edges = N + 1
    lam0, edges = periodic_eigenvalues(p, n_edges)
    if bc == "periodic":
        vals = [lam0] + [v for n in range(2, n_edges + 1, 2) for v in edges[n - 1]]
    else:
        vals = [v for n in range(1, n_edges + 1, 2) for v in edges[n - 1]]
    return np.sort(np.array(vals[:N]))


def impedance_spectrum(q: PeriodicFn, spec, N: int, bc: str = "periodic") -> np.ndarray:
    """Eigenvalues of the transversal mode computed directly in impedance form."""
    return eigenvalues(impedance(q, spec), N, bc)


# ----------------------------------------------------------------------------
# eigenfunctions


def floquet_vector(mo: Monodromy, sigma: float) -> np.ndarray:
    """Eigenvector of the monodromy matrix for the real multiplier ``sigma``."""
    v1 = np.array([mo.phi1, sigma - mo.theta1])
    v2 = np.array([sigma - mo.phi1p, mo.theta1p])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    nv = np.linalg.norm(v)
    if nv == 0:
        # monodromy is sigma * I: every vector is an eigenvector
        return np.array([1.0, 0.0])
    return v / nv


def solution_on_grid(p, lam: float, initial) -> tuple[np.ndarray, np.ndarray]:
    """``(y, z)`` on the operator's sample grid ``x_k = k/M`` (plus ``x = 1``).

    Returned arrays have length ``M + 1``.
    """
    op = _operator(p)
    n = op.n_steps(lam)
    _, (m11, m12, m21, m22) = op.paths(lam, n)
    stride = n // op.grid_size
    y0, z0 = initial
    y = (m11[:, 0] * y0 + m12[:, 0] * z0)[::stride]
    z = (m21[:, 0] * y0 + m22[:, 0] * z0)[::stride]
    return y, z
