"""Spectral analysis of tori of revolution from the command line.

    torus-spectral spectrum        SpectralData of the transversal mode + discriminant sweep
    torus-spectral gapmap          gap vector and mapping estimates
    torus-spectral invert-riccati  reconstruct q from p (m = 1, or E_nu = 0)
    torus-spectral invert-gaps     reconstruct q from a gap vector by Newton
    torus-spectral verify          estimate suite on random profiles
    torus-spectral geometry        embedding -> normalized profile

Exit status: 0 ok, 2 malformed input, 3 solver failure, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import gapmap, geometry, hill, inverse, records
from .core import NonZeroMeanError, PeriodicFn, norm, random_profile, zero
from .riccati import OperatorSpec, RiccatiParams, estimate_report, forward_map

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torus-spectral", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=1, help="dimension of the transversal manifold")
    common.add_argument("--e-nu", type=float, default=0.0, help="transversal eigenvalue E_nu")
    common.add_argument("--r0", type=float, default=1.0, help="reference radius")
    common.add_argument("--n-gaps", type=int, default=gapmap.DEFAULT_N, help="number of gaps N")
    common.add_argument("--grid", type=int, default=256, help="grid size M (power of two)")
    common.add_argument("--tol", type=float, default=1e-6, help="tolerance for invariant checks")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--in", dest="input", default=None, help="input record file")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=["record", "plot"], default="record")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="spectral data of the transversal mode")
    sub.add_parser("gapmap", parents=[common], help="gap vector and mapping estimates")
    sub.add_parser("invert-riccati", parents=[common], help="reconstruct q from p")
    g = sub.add_parser("invert-gaps", parents=[common], help="reconstruct q from a gap vector")
    g.add_argument("--modes", type=int, default=2, help="Fourier modes of q to fit")
    v = sub.add_parser("verify", parents=[common], help="estimate suite on random profiles")
    v.add_argument("--draws", type=int, default=10)
    v.add_argument("--amplitude", type=float, default=0.3)
    v.add_argument("--modes", type=int, default=4)
    v.add_argument("--mapping", action="store_true", help="also check the gap-mapping estimates")
    geo = sub.add_parser("geometry", parents=[common], help="embedding to profile")
    geo.add_argument("--cloud", type=int, default=0, help="emit an n x n point cloud instead")
    return ap


def _read_records(path: str) -> list[records.Record]:
    try:
        with open(path) as fh:
            return records.load(fh)
    except OSError as exc:
        raise records.RecordError(f"cannot read {path}: {exc}") from exc


def _input_fn(args) -> PeriodicFn:
    """Periodic input (q or p); zero when no file is given."""
    if args.input is None:
        return zero(args.grid)
    recs = _read_records(args.input)
    if not recs:
        raise records.RecordError("input holds no records")
    f = records.periodic_fn_from_record(recs[0])
    if f.grid_size != args.grid:
        f = f.resample(args.grid)
    return f


def _spec(args) -> OperatorSpec:
    return OperatorSpec(m=args.m, E_nu=args.e_nu, r0=args.r0)


def cmd_spectrum(args):
    q = _input_fn(args)
    spec = _spec(args)
    op = hill.impedance(q, spec)
    sd = hill.spectral_data(op, args.n_gaps)
    hi = sd.band_edges[-1, 1] + 10.0
    lam = np.linspace(sd.lambda0 - 10.0, hi, 400)
    disc = op.discriminant(lam)
    problems = sd.invariant_violations()
    edge_err = float(hill.edge_residuals(op, sd).max())
    if edge_err > 1e-7:
        problems.append(f"edge discriminant residual {edge_err:.3e}")
    if args.format == "plot":
        text = records.plot_text(lam, disc)
    else:
        c0 = forward_map(q, spec).c0
        rec = records.spectral_data_record(sd)
        rec.scalars["c0"] = c0
        rec.scalars["edge_residual"] = edge_err
        sweep = records.Record("discriminant_sweep", arrays={"lambda": lam, "Lambda": disc})
        text = records.dumps([rec, sweep])
    return text, problems


def cmd_gapmap(args):
    q = _input_fn(args)
    spec = _spec(args)
    sd = hill.spectral_data(hill.impedance(q, spec), args.n_gaps)
    psi = gapmap.gap_vector(sd)
    rep = gapmap.mapping_estimates(q, spec, args.n_gaps, psi=psi)
    problems = [f"estimate {r.name} violated" for r in rep.failures()]
    if args.format == "plot":
        n = np.arange(1, psi.N + 1)
        text = records.plot_text(n, np.hypot(psi.psi1, psi.psi2))
    else:
        text = records.dumps([records.spectral_data_record(sd), records.gap_vector_record(psi),
                              records.estimate_record(rep, "mapping_estimates")])
    return text, problems


def cmd_invert_riccati(args):
    p = _input_fn(args)
    spec = _spec(args)
    if spec.A == 0:
        q = inverse.invert_riccati_a0(p)
        P = forward_map(q, RiccatiParams(1.0, spec.beta, 0.0)).p
        lam = inverse.ground_edge(p)
        checks = {
            "residual": (norm(P - p), norm(P - p) <= args.tol),
            "ground_energy": (abs(lam + norm(q) ** 2), abs(lam + norm(q) ** 2) <= args.tol),
        }
        rec = records.periodic_fn_record(q, "profile_q")
        problems = [k for k, (_, ok) in checks.items() if not ok]
        if args.format == "plot":
            return records.plot_text(q.x, q.samples), problems
        return records.dumps([rec, records.checklist_record(checks)]), problems
    if spec.m != 1:
        raise ValueError("constructive inversion with E_nu > 0 needs m = 1")
    res = inverse.invert_riccati_m1(p, spec.h0)
    res.checks = inverse.inversion_checks(res, p, args.tol)
    problems = [k for k in inverse.GATING_CHECKS if not res.checks[k][1]]
    if args.format == "plot":
        return records.plot_text(res.q.x, res.q.samples), problems
    return records.dumps([records.inversion_record(res), records.checklist_record(res.checks)]), problems


def cmd_invert_gaps(args):
    spec = _spec(args)
    if args.input is None:
        target = gapmap.GapVector.zeros(args.n_gaps)
    else:
        target = records.gap_vector_from_record(records.find(_read_records(args.input), "gap_vector"))
    res = inverse.invert_gap_map(target, spec, args.modes, tol=args.tol, M=args.grid)
    if not res.converged:
        raise hill.SpectralError(f"gap-map Newton did not converge (residual {res.residual:.3e})")
    if args.format == "plot":
        return records.plot_text(np.arange(len(res.trace)), res.trace), []
    q_rec = records.periodic_fn_record(res.q, "profile_q")
    summary = records.Record("newton", scalars={"iterations": res.iterations, "residual": res.residual,
                                                "converged": res.converged},
                             arrays={"coefficients": res.coefficients, "trace": np.array(res.trace)})
    return records.dumps([q_rec, summary]), []


def cmd_verify(args):
    spec = _spec(args)
    rng = np.random.default_rng(args.seed)
    out, problems = [], []
    for i in range(args.draws):
        q = random_profile(rng, args.modes, args.amplitude, args.grid)
        rep = estimate_report(q, spec)
        rec = records.estimate_record(rep)
        rec.scalars["draw"] = i
        out.append(rec)
        problems += [f"draw {i}: {r.name}" for r in rep.failures()]
        if args.mapping:
            mrep = gapmap.mapping_estimates(q, spec, args.n_gaps)
            mrec = records.estimate_record(mrep, "mapping_estimates")
            mrec.scalars["draw"] = i
            out.append(mrec)
            problems += [f"draw {i}: {r.name}" for r in mrep.failures()]
    if args.format == "plot":
        slack = [r.rows[0][3] for r in out if r.kind == "estimate_report"]
        return records.plot_text(np.arange(len(slack)), slack), problems
    return records.dumps(out), problems


def cmd_geometry(args):
    if args.input is None:
        emb = geometry.TorusEmbedding(2.0, PeriodicFn(np.full(args.grid, 0.5)))
    else:
        emb = records.embedding_from_record(records.find(_read_records(args.input), "embedding"))
    if args.cloud:
        pts = geometry.point_cloud(emb, args.cloud, args.cloud)
        return "".join(f"{x!r} {y!r} {z!r}\n" for x, y, z in pts.tolist()), []
    pr = geometry.profile_from_embedding(emb, M=args.grid)
    problems = []
    err = float(np.max(np.abs(pr.radius().samples - pr.h.samples)))
    if err > 1e-8:
        problems.append(f"radius roundtrip error {err:.3e}")
    if args.format == "plot":
        return records.plot_text(pr.h.x, pr.h.samples), problems
    return records.dumps([records.profile_record(pr)]), problems


COMMANDS = {
    "spectrum": cmd_spectrum,
    "gapmap": cmd_gapmap,
    "invert-riccati": cmd_invert_riccati,
    "invert-gaps": cmd_invert_gaps,
    "verify": cmd_verify,
    "geometry": cmd_geometry,
}


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text, problems = COMMANDS[args.command](args)
    except (records.RecordError, NonZeroMeanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (hill.SpectralError, inverse.InversionError, ArithmeticError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for msg in problems:
        print(f"invariant violated: {msg}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
