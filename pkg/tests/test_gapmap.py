import numpy as np
import pytest
from scipy.special import mathieu_a, mathieu_b

from torus_spectral import hill
from torus_spectral.core import PeriodicFn, even_odd_split, random_profile, trig, zero
from torus_spectral.gapmap import (
    GapVector,
    gap_vector,
    mapping_estimates,
    psi_cap_of_p,
    psi_even,
    psi_of_q,
    tail_estimate,
)
from torus_spectral.riccati import OperatorSpec, forward_map

PI2 = np.pi**2


def profile(seed, amp=0.5, modes=5):
    return random_profile(np.random.default_rng(seed), modes, amp)


def test_free_is_zero():
    psi = psi_of_q(zero(), OperatorSpec(1, 0.0, 1.0), 8)
    assert np.max(np.abs(psi.entries)) < 1e-8


def test_mathieu_oracle():
    # even potential: mu_n is an edge, psi_n = (mid - mu_n, 0)
    c = 1.5
    qm = c / PI2
    psi = psi_cap_of_p(trig(cos={1: 2 * c}), 6)
    for n in range(1, 7):
        a, b = PI2 * mathieu_a(n, qm), PI2 * mathieu_b(n, qm)
        lm, lp = min(a, b), max(a, b)
        assert psi.psi1[n - 1] == pytest.approx(0.5 * (lm + lp) - b, abs=1e-8)
        assert psi.psi2[n - 1] == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_pythagoras(seed):
    sd = hill.spectral_data(forward_map(profile(seed), OperatorSpec(1, 1.0, 1.0)).p, 10)
    psi = gap_vector(sd)
    np.testing.assert_allclose(psi.psi1**2 + psi.psi2**2, sd.gap_lengths**2 / 4, atol=1e-9)
    big = np.abs(sd.norming) > 1e-7
    np.testing.assert_array_equal(np.sign(psi.psi2[big]), np.sign(sd.norming[big]))


@pytest.mark.parametrize("E,m", [(0.0, 1), (1.0, 1), (4.0, 1), (2.0, 2)])
def test_backends_agree(E, m):
    q = profile(10 + m, 0.6)
    spec = OperatorSpec(m, E, 1.0)
    a = psi_of_q(q, spec, 8)
    b = psi_of_q(q, spec, 8, backend="schrodinger")
    np.testing.assert_allclose(a.entries, b.entries, atol=1e-7)


def test_shift_invariance():
    p = forward_map(profile(4), OperatorSpec(1, 1.0, 1.0)).p
    a = psi_cap_of_p(p, 8)
    b = psi_cap_of_p(p + 3.25, 8)
    np.testing.assert_allclose(a.entries, b.entries, atol=1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_odd_profile_structure(seed):
    _, q = even_odd_split(profile(seed, 0.8))
    spec = OperatorSpec(1, 1.0, 1.0)
    sd = hill.spectral_data(hill.impedance(q, spec), 8)
    psi = gap_vector(sd)
    np.testing.assert_allclose(psi.psi2, 0.0, atol=1e-7)
    np.testing.assert_allclose(np.abs(psi.psi1), sd.gap_lengths / 2, atol=1e-7)
    np.testing.assert_allclose(psi_even(q, spec, 8), psi.psi1, atol=1e-12)


def test_psi_even_rejects_non_odd():
    with pytest.raises(ValueError):
        psi_even(trig(cos={1: 0.1}), OperatorSpec(), 4)


def test_decay():
    q = profile(5, 0.5)
    spec = OperatorSpec(1, 1.0, 1.0)
    s8 = psi_of_q(q, spec, 8).norm(0)
    s16 = psi_of_q(q, spec, 16).norm(0)
    # adding gaps 9..16 changes the norm less than the first 8 contribute
    assert s8 <= s16 + 1e-12
    assert s16**2 - s8**2 < 0.5 * s8**2


def test_tail_estimate_band_limited():
    p = trig(cos={1: 1.0, 3: 0.5})
    assert tail_estimate(p, 4) == pytest.approx(0.0, abs=1e-14)
    assert tail_estimate(p, 2) == pytest.approx(0.25, abs=1e-14)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("m", [1, 2])
def test_mapping_estimates(seed, m):
    rep = mapping_estimates(profile(seed, 0.4), OperatorSpec(m, 1.0, 1.0), 10)
    assert rep.passed, str(rep)


class TestGapVector:
    def test_norms(self):
        gv = GapVector([[3.0, 4.0], [0.0, 0.0]])
        assert gv.N == 2
        assert gv.norm(0) == pytest.approx(5.0)
        assert gv.norm(-1) == pytest.approx(5.0 / (2 * np.pi))
        np.testing.assert_array_equal(gv.flat(), [3.0, 4.0, 0.0, 0.0])

    def test_zeros(self):
        assert GapVector.zeros(3).entries.shape == (3, 2)

    def test_reshapes_flat_input(self):
        assert GapVector(np.arange(6.0)).entries.tolist() == [[0, 1], [2, 3], [4, 5]]


def test_unknown_backend():
    with pytest.raises(ValueError):
        psi_of_q(zero(), OperatorSpec(), 2, backend="galerkin")
