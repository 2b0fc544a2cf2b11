"""Real 1-periodic functions on a uniform grid.

A :class:`PeriodicFn` stores samples ``f(k/M)``, ``k = 0..M-1`` of a real
function of period 1, together with its discrete Fourier coefficients.
Everything downstream (profiles ``q``, potentials ``p``, curvatures) is
carried in this form, and all quadrature is the trapezoid rule on the grid,
which is spectrally accurate for smooth periodic integrands.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

DEFAULT_GRID = 256
MEAN_TOL = 1e-10
TWO_PI = 2.0 * np.pi


class NonZeroMeanError(ValueError):
    """Raised when an operation needs a zero-mean function and did not get one."""


def _check_grid_size(m: int) -> None:
    if m < 16 or m & (m - 1):
        raise ValueError(f"grid size must be a power of two >= 16, got {m}")


@dataclass(frozen=True, eq=False)
class PeriodicFn:
    """Samples of a real 1-periodic function on ``x_k = k/M``."""

    samples: np.ndarray
    label: str | None = None

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).ravel()
        _check_grid_size(s.size)
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def grid_size(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Complex coefficients ``c_n`` in numpy FFT order, ``f = sum c_n e^{2 pi i n x}``."""
        c = np.fft.fft(self.samples) / self.grid_size
        c.setflags(write=False)
        return c

    @property
    def modes(self) -> np.ndarray:
        return np.fft.fftfreq(self.grid_size, 1.0 / self.grid_size).astype(int)

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    def coefficient(self, n: int) -> complex:
        if abs(n) > self.grid_size // 2:
            return 0j
        return complex(self.coeffs[n % self.grid_size])

    def __call__(self, x) -> np.ndarray:
        """Trigonometric interpolant evaluated at arbitrary points."""
        x = np.asarray(x, dtype=float)
        m = self.grid_size
        c = np.fft.rfft(self.samples) / m
        w = np.full(c.size, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        k = np.arange(c.size)
        phase = np.exp(TWO_PI * 1j * np.multiply.outer(x.ravel(), k))
        # the Nyquist term is a pure cosine on the grid
        out = (phase[:, :-1] @ (w[:-1] * c[:-1])).real
        out += c[-1].real * np.cos(np.pi * m * x.ravel())
        return out.reshape(x.shape)

    def derivative(self, order: int = 1) -> PeriodicFn:
        c = np.fft.fft(self.samples)
        k = self.modes.astype(float)
        d = (TWO_PI * 1j * k) ** order * c
        if order % 2:
            d[self.grid_size // 2] = 0.0
        return PeriodicFn(np.fft.ifft(d).real)

    def resample(self, m: int) -> PeriodicFn:
        """Band-limited interpolation onto an ``m``-point grid."""
        if m == self.grid_size:
            return self
        _check_grid_size(m)
        return PeriodicFn(self(np.arange(m) / m), self.label)

    def inner(self, other: PeriodicFn) -> float:
        """Real L2(0,1) pairing ``(f, g)``."""
        return float(np.mean(self.samples * _compatible(self, other).samples))

    def integral(self) -> float:
        return self.mean

    # arithmetic keeps the grid and drops labels
    def _binary(self, other, op):
        if isinstance(other, PeriodicFn):
            return PeriodicFn(op(self.samples, _compatible(self, other).samples))
        return PeriodicFn(op(self.samples, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return PeriodicFn(float(other) - self.samples)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __rtruediv__(self, other):
        return PeriodicFn(float(other) / self.samples)

    def __neg__(self):
        return PeriodicFn(-self.samples)

    def apply(self, func) -> PeriodicFn:
        """Pointwise ``func(samples)``; the result is re-analyzed on the same grid."""
        return PeriodicFn(func(self.samples))

    def __repr__(self) -> str:
        tag = f" {self.label!r}" if self.label else ""
        return f"PeriodicFn{tag}(M={self.grid_size}, mean={self.mean:.3g})"


def _compatible(f: PeriodicFn, g: PeriodicFn) -> PeriodicFn:
    if g.grid_size != f.grid_size:
        raise ValueError(f"grid mismatch: {f.grid_size} vs {g.grid_size}")
    return g


def analyze(samples) -> PeriodicFn:
    """Build a :class:`PeriodicFn` from grid samples."""
    return PeriodicFn(samples)


def synthesize(coeffs) -> np.ndarray:
    """Grid samples from FFT-ordered coefficients (inverse of ``analyze``)."""
    c = np.asarray(coeffs, dtype=complex)
    return np.fft.ifft(c * c.size).real


def from_function(func, m: int = DEFAULT_GRID, label: str | None = None) -> PeriodicFn:
    return PeriodicFn(func(np.arange(m) / m), label)


def trig(
    cos: Mapping[int, float] | None = None,
    sin: Mapping[int, float] | None = None,
    m: int = DEFAULT_GRID,
    label: str | None = None,
) -> PeriodicFn:
    """Trigonometric polynomial ``sum a_k cos 2 pi k x + b_k sin 2 pi k x``."""
    x = np.arange(m) / m
    s = np.zeros(m)
    for k, a in (cos or {}).items():
        s += a * np.cos(TWO_PI * k * x)
    for k, b in (sin or {}).items():
        s += b * np.sin(TWO_PI * k * x)
    return PeriodicFn(s, label)


def zero(m: int = DEFAULT_GRID) -> PeriodicFn:
    return PeriodicFn(np.zeros(m))


def require_zero_mean(f: PeriodicFn, what: str = "function", tol: float = MEAN_TOL) -> None:
    if abs(f.mean) > tol:
        raise NonZeroMeanError(f"{what} must have zero mean (got {f.mean:.3e})")


def _antiderivative_coeffs(f: PeriodicFn) -> np.ndarray:
    c = np.fft.fft(f.samples)
    k = f.modes.astype(float)
    out = np.zeros_like(c)
    nz = k != 0
    out[nz] = c[nz] / (TWO_PI * 1j * k[nz])
    out[f.grid_size // 2] = 0.0
    return out


def zero_mean_antiderivative(f: PeriodicFn) -> PeriodicFn:
    """The antiderivative ``g`` with ``g' = f`` and ``int g = 0``."""
    require_zero_mean(f)
    return PeriodicFn(np.fft.ifft(_antiderivative_coeffs(f)).real)


def antiderivative_zero_start(f: PeriodicFn) -> PeriodicFn:
    """``F(x) = int_0^x f``; periodic because ``f`` has zero mean."""
    require_zero_mean(f)
    g = np.fft.ifft(_antiderivative_coeffs(f)).real
    return PeriodicFn(g - g[0])


def norm(f: PeriodicFn, j: int = 0) -> float:
    """Sobolev-type norm ``||f^{(j)}||`` for ``j`` in ``{-1, 0, 1, 2}``.

    For ``j = -1`` the function must have zero mean and the result is the L2
    norm of its zero-mean antiderivative.
    """
    if j == 0:
        return float(np.sqrt(np.mean(f.samples**2)))
    if j in (1, 2):
        return norm(f.derivative(j), 0)
    if j == -1:
        return norm(zero_mean_antiderivative(f), 0)
    raise ValueError(f"unsupported Sobolev index {j}")


def even_odd_split(f: PeriodicFn) -> tuple[PeriodicFn, PeriodicFn]:
    """Split into parts symmetric / antisymmetric under ``x -> 1 - x``."""
    s = f.samples
    r = np.roll(s[::-1], 1)  # r[k] = s[-k mod M] = f(1 - x_k)
    return PeriodicFn(0.5 * (s + r)), PeriodicFn(0.5 * (s - r))


def weighted_l2_norm(v, j: int = 0) -> float:
    """``(sum_n (2 pi n)^{2j} (v_n1^2 + v_n2^2))^{1/2}`` for a gap vector."""
    if j not in (-1, 0):
        raise ValueError("weight index must be -1 or 0")
    e = np.asarray(getattr(v, "entries", v), dtype=float).reshape(-1, 2)
    n = np.arange(1, e.shape[0] + 1)
    w = (TWO_PI * n) ** (2 * j)
    return float(np.sqrt(np.sum(w * (e**2).sum(axis=1))))


def random_profile(
    rng: np.random.Generator,
    n_modes: int = 4,
    amplitude: float = 0.3,
    m: int = DEFAULT_GRID,
) -> PeriodicFn:
    """Random zero-mean trigonometric polynomial with ``1/n^2`` coefficient decay."""
    x = np.arange(m) / m
    s = np.zeros(m)
    for n in range(1, n_modes + 1):
        a, b = rng.uniform(-1.0, 1.0, size=2) * amplitude / n**2
        s += a * np.cos(TWO_PI * n * x) + b * np.sin(TWO_PI * n * x)
    return PeriodicFn(s)
