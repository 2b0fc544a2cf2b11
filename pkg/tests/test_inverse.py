import numpy as np
import pytest

from torus_spectral import hill
from torus_spectral.core import norm, random_profile, trig, zero
from torus_spectral.gapmap import GapVector, psi_of_q
from torus_spectral.inverse import (
    GATING_CHECKS,
    explicit_v,
    eigen_gradient,
    floquet_constants,
    ground_edge,
    ground_floquet,
    invert_gap_map,
    invert_riccati_a0,
    invert_riccati_m1,
    profile_from_coefficients,
)
from torus_spectral.riccati import OperatorSpec, RiccatiParams, forward_map


def band_limited(seed, size=1.0, modes=4):
    """Random q with ||q'|| = size."""
    q = random_profile(np.random.default_rng(seed), modes, 1.0)
    return q * (size / norm(q, 1))


class TestFloquet:
    def test_constants_reference_value(self):
        c1, c2 = floquet_constants(1.0)
        assert c1 == pytest.approx(0.31304, abs=5e-6)
        assert c2 == pytest.approx(c1 * np.e**2, rel=1e-15)

    def test_free(self):
        flo = ground_floquet(zero(), s=0.7)
        assert flo.lambda0 == pytest.approx(-0.49, abs=1e-10)
        np.testing.assert_allclose(flo.phi1.samples, 1.0, atol=1e-10)
        np.testing.assert_allclose(flo.log_derivative.samples, 0.7, atol=1e-10)

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_properties(self, s):
        p = forward_map(band_limited(1), OperatorSpec(1, 1.0, 1.0)).p
        flo = ground_floquet(p, s)
        assert np.all(flo.phi1.samples > 0)
        assert norm(flo.phi1) == pytest.approx(1.0, abs=1e-10)
        assert flo.periodicity_residual < 1e-7
        assert flo.lambda0 < flo.lambda0_plus
        assert hill.discriminant(p, flo.lambda0) == pytest.approx(np.cosh(s), abs=1e-9)
        assert flo.multiplier == pytest.approx(np.exp(s))
        # phi = e^{sx} phi1 solves -phi'' + p phi = lam phi
        y = flo.phi1
        phi_res = -(y.derivative(2) + 2 * s * y.derivative() + s * s * y) + (p - flo.lambda0) * y
        assert np.max(np.abs(phi_res.samples)) < 1e-7

    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            ground_floquet(zero(), s=0.0)


class TestRiccatiM1:
    def test_free(self):
        res = invert_riccati_m1(zero(), 1.3)
        assert norm(res.q) < 1e-10
        assert res.exponent == pytest.approx(1.3, abs=1e-10)
        np.testing.assert_allclose(res.h.samples, 1.3, atol=1e-10)

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("E,r0", [(1.0, 1.0), (4.0, 1.5)])
    def test_roundtrip(self, seed, E, r0):
        q = band_limited(seed)
        spec = OperatorSpec(1, E, r0)
        p = forward_map(q, spec).p
        res = invert_riccati_m1(p, spec.h0)
        assert norm(res.q - q) / norm(q) < 1e-6
        assert res.ground_energy_gap < 1e-6
        assert res.residual < 1e-6
        # int h equals the Floquet exponent, and h = h0 exp(-2Q)
        assert res.h_integral == pytest.approx(res.exponent, abs=1e-8)
        out = forward_map(q, spec)
        np.testing.assert_allclose(res.h.samples, spec.h0 * np.exp(-2 * out.Q.samples), atol=1e-8)
        assert all(res.checks[k][1] for k in GATING_CHECKS)

    def test_spectral_v_matches_explicit_integral(self):
        q = band_limited(5)
        spec = OperatorSpec(1, 1.0, 1.0)
        res = invert_riccati_m1(forward_map(q, spec).p, spec.h0)
        flo = ground_floquet(forward_map(q, spec).p, res.exponent)
        x = np.array([0.0, 0.125, 0.5, 0.75])
        v_spec = (spec.h0 / res.h)(x)
        np.testing.assert_allclose(explicit_v(flo, spec.h0, x), v_spec, rtol=1e-9)

    def test_unit_exponent_variant(self):
        q = band_limited(6)
        spec = OperatorSpec(1, 1.0, 1.0)
        p = forward_map(q, spec).p
        res = invert_riccati_m1(p, spec.h0, exponent=1.0)
        assert res.h_integral == pytest.approx(1.0, abs=1e-8)
        assert res.ground_energy_gap < 1e-6
        # exact inverse for the amplitude h(0)^2
        P = forward_map(res.q, RiccatiParams(1.0, 4.0, res.h.samples[0] ** 2)).p
        assert norm(P - p) < 1e-6

    def test_rejects(self):
        with pytest.raises(ValueError):
            invert_riccati_m1(zero(), 0.0)
        with pytest.raises(ValueError):
            invert_riccati_m1(trig(cos={0: 1.0}), 1.0)


class TestRiccatiA0:
    @pytest.mark.parametrize("seed", range(3))
    def test_roundtrip(self, seed):
        q = band_limited(seed, 1.5)
        p = forward_map(q, OperatorSpec(1, 0.0, 1.0)).p
        rec = invert_riccati_a0(p)
        assert norm(rec - q) < 1e-9
        assert ground_edge(p) == pytest.approx(-norm(q) ** 2, abs=1e-9)


class TestEigenGradient:
    @pytest.mark.parametrize("which", [("dirichlet", 1), ("dirichlet", 3), ("ground", 0),
                                       ("minus", 1), ("plus", 2)])
    def test_against_finite_differences(self, which):
        p = trig(cos={1: 2.0, 2: 1.0}, sin={1: 0.7})
        f = trig(cos={1: 1.0}, sin={2: 1.0, 3: 0.5})
        kind, n = which

        def value(pp):
            if kind == "dirichlet":
                return hill.dirichlet_eigenvalues(pp, n)[-1]
            lam0, edges = hill.periodic_eigenvalues(pp, max(n, 1))
            if kind == "ground":
                return lam0
            return edges[n - 1, 0 if kind == "minus" else 1]

        t = 1e-5
        fd = (value(p + t * f) - value(p - t * f)) / (2 * t)
        g = eigen_gradient(p, which)
        assert g.mean == pytest.approx(1.0, abs=1e-12)
        assert g.inner(f) == pytest.approx(fd, abs=1e-7)

    def test_closed_gap_is_degenerate(self):
        with pytest.raises(hill.DegenerateEigenvalueError):
            eigen_gradient(zero(), ("minus", 1))

    def test_unknown_selector(self):
        with pytest.raises(ValueError):
            eigen_gradient(zero(), ("middle", 1))


def test_profile_from_coefficients():
    q = profile_from_coefficients([0.1, 0.2, 0.3, 0.0], 64)
    x = q.x
    exact = 0.1 * np.sin(2 * np.pi * x) + 0.2 * np.cos(2 * np.pi * x) + 0.3 * np.sin(4 * np.pi * x)
    np.testing.assert_allclose(q.samples, exact, atol=1e-15)


class TestGapNewton:
    def test_zero_target_is_fixed_point(self):
        res = invert_gap_map(GapVector.zeros(4), OperatorSpec(1, 0.0, 1.0), 1)
        assert res.converged and res.iterations == 0
        assert norm(res.q) == 0.0

    def test_single_mode_roundtrip(self):
        spec = OperatorSpec(1, 1.0, 1.0)
        c = np.array([0.2, -0.1])
        target = psi_of_q(profile_from_coefficients(c), spec, 4)
        res = invert_gap_map(target, spec, 1)
        assert res.converged
        np.testing.assert_allclose(res.coefficients, c, atol=1e-6)
        assert res.trace[-1] == res.residual
        assert all(b < a for a, b in zip(res.trace, res.trace[1:]))

    def test_warm_start(self):
        spec = OperatorSpec(1, 1.0, 1.0)
        c = np.array([0.15, 0.05])
        q = profile_from_coefficients(c)
        res = invert_gap_map(psi_of_q(q, spec, 4), spec, 1, q0=q)
        assert res.iterations <= 1
        np.testing.assert_allclose(res.coefficients, c, atol=1e-6)
