"""The perturbed Riccati map and its a-priori estimates.

Draws random zero-mean profiles q, maps them to potentials P(q) for a few
transversal modes, and prints the identity/estimate table with slack.
"""
import numpy as np

from torus_spectral.core import norm, random_profile
from torus_spectral.riccati import OperatorSpec, estimate_report, forward_map, frechet_apply

SEED = 3
MODES = [OperatorSpec(1, 0.0, 1.0), OperatorSpec(1, 4.0, 1.0), OperatorSpec(2, 1.0, 0.7)]


def one_report(q, spec):
    out = forward_map(q, spec)
    print(f"\nm = {spec.m}, E_nu = {spec.E_nu}, r0 = {spec.r0}: c0 = {out.c0:.6f}, ||P(q)|| = {norm(out.p):.6f}")
    print(estimate_report(q, spec))


def derivative_check(q, spec, rng):
    f = random_profile(rng, 5, 1.0)
    d = frechet_apply(q, f, spec)
    for t in (1e-2, 1e-3, 1e-4):
        fd = (forward_map(q + t * f, spec).p - forward_map(q, spec).p) * (1 / t)
        print(f"step {t:.0e}: ||difference quotient - dP[f]|| = {norm(fd - d):.3e}")


if __name__ == "__main__":
    rng = np.random.default_rng(SEED)
    q = random_profile(rng, 6, 0.6)
    print(f"||q|| = {norm(q):.6f}, ||q'|| = {norm(q, 1):.6f}")
    for spec in MODES:
        one_report(q, spec)
    print("\nfirst-order convergence of the directional derivative:")
    derivative_check(q, MODES[1], rng)
