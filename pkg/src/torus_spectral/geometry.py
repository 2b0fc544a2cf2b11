"""Embedded tori of revolution: arc length, profile extraction and the profile/q dictionary.

The surface is

    x = (a + R(theta) cos theta) cos phi,  y = (a + R(theta) cos theta) sin phi,
    z = a + R(theta) sin theta,

with ``0 < R < a``. Its meridian has line element ``sqrt(R'^2 + R^2) dtheta``;
in arc length ``t`` the metric is ``dt^2 + r(t)^2 dphi^2`` with
``r = a + R cos theta`` and ``|dr/dt| <= 1``. Rescaling by the meridian length
``b`` gives a 1-periodic profile ``h(tau) = r(b tau) / b``.

``R`` is carried as a :class:`PeriodicFn` in the normalized variable
``theta / (2 pi)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, PeriodicFn, antiderivative_zero_start, require_zero_mean

SLOPE_TOL = 1e-9


@dataclass(frozen=True)
class TorusEmbedding:
    a: float
    R: PeriodicFn

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("major radius a must be positive")
        s = self.R.samples
        if np.any(s <= 0) or np.any(s >= self.a):
            raise ValueError("need 0 < R(theta) < a")

    def radius(self, theta) -> np.ndarray:
        return self.R(np.asarray(theta) / TWO_PI)

    def radius_derivative(self, theta) -> np.ndarray:
        """``dR/dtheta``."""
        return self.R.derivative()(np.asarray(theta) / TWO_PI) / TWO_PI


@dataclass(frozen=True)
class ArcLength:
    """Meridian arc length ``t(theta)`` and its inverse."""

    b: float
    speed: PeriodicFn  # sqrt(R'^2 + R^2) in the normalized variable
    _wiggle: PeriodicFn  # t(theta) = b theta/(2 pi) + 2 pi * wiggle(theta / 2 pi)

    def t_of_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        s = theta / TWO_PI
        return self.b * s + TWO_PI * self._wiggle(s % 1.0)

    def theta_of_t(self, t, tol: float = 1e-15, max_iter: int = 50) -> np.ndarray:
        """Invert ``t(theta)`` by Newton iteration; ``dt/dtheta > 0`` everywhere."""
        t = np.asarray(t, dtype=float)
        theta = TWO_PI * t / self.b
        for _ in range(max_iter):
            resid = self.t_of_theta(theta) - t
            step = resid / self.speed((theta / TWO_PI) % 1.0)
            theta = theta - step
            if np.max(np.abs(step), initial=0.0) < tol * TWO_PI:
                break
        return theta


def arclength_param(emb: TorusEmbedding, upsample: int = 4) -> ArcLength:
    """``b = int_0^{2 pi} sqrt(R'^2 + R^2) dtheta`` and the map ``t <-> theta``.

    The speed is sampled on a grid ``upsample`` times finer than ``R``'s so the
    square root does not alias.
    """
    M = emb.R.grid_size * upsample
    R = emb.R.resample(M)
    dR = R.derivative().samples / TWO_PI
    speed = PeriodicFn(np.sqrt(dR**2 + R.samples**2))
    mean = speed.mean
    wiggle = antiderivative_zero_start(speed - mean)
    return ArcLength(b=TWO_PI * mean, speed=speed, _wiggle=wiggle)


@dataclass(frozen=True)
class Profile:
    """Normalized meridian profile: ``h = r0 exp(2Q)`` on ``[0, 1]`` (``m = 1``)."""

    r0: float
    q: PeriodicFn
    b: float
    h: PeriodicFn
    max_slope: float

    def radius(self, m: int = 1) -> PeriodicFn:
        return profile_to_radius(self.q, self.r0, m)


def profile_from_embedding(emb: TorusEmbedding, M: int = 256, upsample: int = 4) -> Profile:
    """Arc-length profile ``h(tau) = r(b tau) / b`` and ``q = (log h)'/2``.

    ``r0 = h(0)``; raises ``ValueError`` if ``max |h'| > 1 + 1e-9``.
    """
    arc = arclength_param(emb, upsample)
    tau = np.arange(M) / M
    theta = arc.theta_of_t(arc.b * tau)
    R = emb.radius(theta)
    dR = emb.radius_derivative(theta)
    h = (emb.a + R * np.cos(theta)) / arc.b
    slope = (dR * np.cos(theta) - R * np.sin(theta)) / np.sqrt(dR**2 + R**2)
    max_slope = float(np.max(np.abs(slope)))
    if max_slope > 1.0 + SLOPE_TOL:
        raise ValueError(f"|h'| = {max_slope:.12g} exceeds 1")
    H = PeriodicFn(h)
    q = 0.5 * PeriodicFn(np.log(h)).derivative()
    q = q - q.mean
    return Profile(r0=float(h[0]), q=q, b=arc.b, h=H, max_slope=max_slope)


def profile_to_radius(q: PeriodicFn, r0: float, m: int = 1) -> PeriodicFn:
    """``r(x) = r0 exp((2/m) Q(x))`` with ``Q(x) = int_0^x q``."""
    require_zero_mean(q, "q")
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    Q = antiderivative_zero_start(q)
    return PeriodicFn(r0 * np.exp(2.0 * Q.samples / m))


def point_cloud(emb: TorusEmbedding, n_theta: int = 64, n_phi: int = 64) -> np.ndarray:
    """``(n_theta * n_phi, 3)`` surface points for plotting."""
    theta, phi = np.meshgrid(np.arange(n_theta) * TWO_PI / n_theta,
                             np.arange(n_phi) * TWO_PI / n_phi, indexing="ij")
    R = emb.radius(theta.ravel()).reshape(theta.shape)
    rad = emb.a + R * np.cos(theta)
    pts = np.stack([rad * np.cos(phi), rad * np.sin(phi), emb.a + R * np.sin(theta)], axis=-1)
    return pts.reshape(-1, 3)
