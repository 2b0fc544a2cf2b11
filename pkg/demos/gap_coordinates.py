"""Gap coordinates psi(q) of the transversal mode.

Computes psi from the impedance operator and from the Schroedinger potential
P(q), shows that they agree, and that an odd profile has psi_n2 = 0.
"""
import numpy as np

from torus_spectral import hill
from torus_spectral.core import even_odd_split, random_profile
from torus_spectral.gapmap import gap_vector, mapping_estimates, psi_of_q
from torus_spectral.riccati import OperatorSpec

SEED = 11
SPEC = OperatorSpec(1, 1.0, 1.0)
N = 8


def print_psi(label, psi):
    print(f"\n{label}")
    print(" n        psi_n1          psi_n2")
    for n, (a, b) in enumerate(psi.entries, 1):
        print(f"{n:2d} {a:15.6e} {b:15.6e}")


if __name__ == "__main__":
    q = random_profile(np.random.default_rng(SEED), 5, 0.6)
    imp = psi_of_q(q, SPEC, N)
    sch = psi_of_q(q, SPEC, N, backend="schrodinger")
    print_psi("psi(q), impedance operator", imp)
    print(f"\nmax |impedance - Schroedinger| = {np.abs(imp.entries - sch.entries).max():.2e}")
    print(f"||psi||_0 = {imp.norm(0):.6e}, ||psi||_-1 = {imp.norm(-1):.6e}")
    print("\n" + str(mapping_estimates(q, SPEC, N, psi=imp)))

    _, q_odd = even_odd_split(q)
    data = hill.spectral_data(hill.impedance(q_odd, SPEC), N)
    odd = gap_vector(data)
    print_psi("odd part of q: psi_n2 vanishes and |psi_n1| = |gap|/2", odd)
    print(f"max ||psi_n1| - |gap|/2| = {np.abs(np.abs(odd.psi1) - data.gap_lengths / 2).max():.2e}")
