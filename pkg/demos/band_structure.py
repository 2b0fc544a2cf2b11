"""Band structure of a Hill operator.

Builds the potential p(x) = 2c cos(2 pi x) + 0.8 sin(4 pi x), tabulates the
discriminant, and lists band edges, Dirichlet eigenvalues and norming
constants. The shooting results are set against the Galerkin oracle.
"""
import numpy as np

from torus_spectral import hill
from torus_spectral.core import trig
from torus_spectral.galerkin import galerkin_spectrum

C = 1.5
N_GAPS = 6


def build_potential():
    return trig(cos={1: 2 * C}, sin={2: 0.8})


def show_discriminant(p, data):
    lam = np.linspace(data.lambda0 - 5, data.band_edges[-1, 1] + 5, 9)
    print("lambda          Lambda(lambda)")
    for x, d in zip(lam, hill.discriminant(p, lam)):
        print(f"{x:12.4f}  {d:14.6f}")


def show_gaps(data):
    print(f"\nlambda_0^+ = {data.lambda0:.10f}")
    print(" n      lambda^-          mu_n          lambda^+      |gap|      kappa_n")
    for n in range(data.N):
        lm, lp = data.band_edges[n]
        print(f"{n + 1:2d} {lm:14.8f} {data.dirichlet[n]:14.8f} {lp:14.8f} "
              f"{lp - lm:10.3e} {data.norming[n]:11.3e}")


def compare_with_galerkin(p):
    for bc in ("periodic", "antiperiodic", "dirichlet"):
        diff = np.abs(hill.eigenvalues(p, 8, bc) - galerkin_spectrum(p, 8, bc)).max()
        print(f"{bc:>12}: max |shooting - Galerkin| = {diff:.2e}")


if __name__ == "__main__":
    p = build_potential()
    data = hill.spectral_data(p, N_GAPS)
    show_discriminant(p, data)
    show_gaps(data)
    print()
    compare_with_galerkin(p)
    print("invariant violations:", data.invariant_violations() or "none")
