"""Newton inversion of the gap map on two Fourier modes.

A profile q = a1 sin 2 pi x + b1 cos 2 pi x + a2 sin 4 pi x + b2 cos 4 pi x is
mapped to psi(q); damped Gauss-Newton started from q = 0 recovers the
coefficients. Convergence is local.
"""
import numpy as np

from torus_spectral.core import norm
from torus_spectral.gapmap import psi_of_q
from torus_spectral.inverse import invert_gap_map, profile_from_coefficients
from torus_spectral.riccati import OperatorSpec

SEED = 7
SPEC = OperatorSpec(1, 1.0, 1.0)
N_GAPS = 6

if __name__ == "__main__":
    c = np.random.default_rng(SEED).uniform(-0.3, 0.3, 4)
    q = profile_from_coefficients(c)
    target = psi_of_q(q, SPEC, N_GAPS)
    res = invert_gap_map(target, SPEC, 2)
    print("true coefficients     ", np.array2string(c, precision=8))
    print("recovered coefficients", np.array2string(res.coefficients, precision=8))
    print("residual per iteration", ["%.2e" % r for r in res.trace])
    print(f"converged = {res.converged} after {res.iterations} iterations, "
          f"||q_rec - q||_1 = {norm(res.q - q, 1):.3e}")
