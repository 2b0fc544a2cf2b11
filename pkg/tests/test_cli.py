import numpy as np
import pytest

from torus_spectral import records
from torus_spectral.cli import EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, EXIT_SOLVER, run
from torus_spectral.core import PeriodicFn, random_profile, trig
from torus_spectral.gapmap import gap_vector, psi_of_q
from torus_spectral.geometry import TorusEmbedding
from torus_spectral.inverse import profile_from_coefficients
from torus_spectral.riccati import OperatorSpec, forward_map


def write(tmp_path, name, recs):
    path = tmp_path / name
    path.write_text(records.dumps(recs))
    return str(path)


def invoke(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_free(capsys):
    code, out, _ = invoke(capsys, ["spectrum", "--n-gaps", "4"])
    assert code == EXIT_OK
    recs = records.loads(out)
    sd = records.spectral_data_from_record(records.find(recs, "spectral_data"))
    np.testing.assert_allclose(sd.dirichlet, (np.arange(1, 5) * np.pi) ** 2, atol=1e-8)
    sweep = records.find(recs, "discriminant_sweep")
    assert sweep["lambda"].size == sweep["Lambda"].size == 400


def test_spectrum_profile_with_shift(capsys, tmp_path):
    q = random_profile(np.random.default_rng(0), 4, 0.4)
    path = write(tmp_path, "q.rec", [records.periodic_fn_record(q, "profile_q")])
    code, out, _ = invoke(capsys, ["spectrum", "--in", path, "--e-nu", "1", "--n-gaps", "5"])
    assert code == EXIT_OK
    rec = records.find(records.loads(out), "spectral_data")
    assert rec["c0"] == pytest.approx(forward_map(q, OperatorSpec(1, 1.0, 1.0)).c0)
    assert rec["edge_residual"] < 1e-7


def test_gapmap_reparses(capsys, tmp_path):
    q = random_profile(np.random.default_rng(1), 4, 0.4)
    path = write(tmp_path, "q.rec", [records.periodic_fn_record(q)])
    code, out, _ = invoke(capsys, ["gapmap", "--in", path, "--e-nu", "1", "--n-gaps", "6"])
    assert code == EXIT_OK
    recs = records.loads(out)
    gv = records.gap_vector_from_record(records.find(recs, "gap_vector"))
    sd = records.spectral_data_from_record(records.find(recs, "spectral_data"))
    np.testing.assert_array_equal(gv.entries, gap_vector(sd).entries)
    assert records.find(recs, "mapping_estimates")["pass"] is True


def test_invert_riccati(capsys, tmp_path):
    p = forward_map(trig(sin={1: 0.3}), OperatorSpec(1, 1.0, 1.0)).p
    path = write(tmp_path, "p.rec", [records.periodic_fn_record(p)])
    code, out, _ = invoke(capsys, ["invert-riccati", "--in", path, "--e-nu", "1"])
    assert code == EXIT_OK
    recs = records.loads(out)
    res = records.inversion_from_record(records.find(recs, "inversion_result"))
    np.testing.assert_allclose(res.q.samples, trig(sin={1: 0.3}).samples, atol=1e-8)
    names = {r[0]: r[2] for r in records.find(recs, "checklist").rows}
    assert names["ground_energy"] is True and names["residual"] is True
    assert "h_integral_one" in names


def test_invert_riccati_a0(capsys, tmp_path):
    q = trig(sin={1: 0.3}, cos={2: 0.1})
    p = forward_map(q, OperatorSpec(1, 0.0, 1.0)).p
    path = write(tmp_path, "p.rec", [records.periodic_fn_record(p)])
    code, out, _ = invoke(capsys, ["invert-riccati", "--in", path])
    assert code == EXIT_OK
    back = records.periodic_fn_from_record(records.find(records.loads(out), "profile_q"))
    np.testing.assert_allclose(back.samples, q.samples, atol=1e-9)


def test_invert_riccati_higher_m_is_input_error(capsys):
    code, _, err = invoke(capsys, ["invert-riccati", "--m", "2", "--e-nu", "1"])
    assert code == EXIT_INPUT
    assert "m = 1" in err


def test_invert_gaps(capsys, tmp_path):
    spec = OperatorSpec(1, 1.0, 1.0)
    c = np.array([0.1, 0.05])
    target = psi_of_q(profile_from_coefficients(c), spec, 4)
    path = write(tmp_path, "psi.rec", [records.gap_vector_record(target)])
    code, out, _ = invoke(capsys, ["invert-gaps", "--in", path, "--e-nu", "1", "--modes", "1"])
    assert code == EXIT_OK
    newton = records.find(records.loads(out), "newton")
    np.testing.assert_allclose(newton["coefficients"], c, atol=1e-6)
    assert newton["converged"] is True


def test_invert_gaps_nonconvergence_is_solver_failure(capsys, tmp_path):
    # a gap vector no single-mode profile reaches
    target = [[0.0, 0.0], [5.0, 0.0]]
    rec = records.Record("gap_vector", columns=["n", "psi1", "psi2"],
                         rows=[[i + 1, a, b] for i, (a, b) in enumerate(target)])
    path = write(tmp_path, "psi.rec", [rec])
    code, _, err = invoke(capsys, ["invert-gaps", "--in", path, "--modes", "1"])
    assert code == EXIT_SOLVER
    assert "did not converge" in err


def test_verify_deterministic(capsys):
    argv = ["verify", "--draws", "3", "--seed", "7", "--e-nu", "1"]
    code1, out1, _ = invoke(capsys, argv)
    code2, out2, _ = invoke(capsys, argv)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    recs = records.loads(out1)
    assert len(recs) == 3 and all(r["pass"] is True for r in recs)


def test_verify_mapping(capsys):
    code, out, _ = invoke(capsys, ["verify", "--draws", "1", "--mapping", "--n-gaps", "6"])
    assert code == EXIT_OK
    assert [r.kind for r in records.loads(out)] == ["estimate_report", "mapping_estimates"]


def test_geometry(capsys, tmp_path):
    R = 0.5 * (1 + 0.1 * np.cos(2 * np.pi * np.arange(256) / 256))
    path = write(tmp_path, "emb.rec", [records.embedding_record(TorusEmbedding(2.0, PeriodicFn(R)))])
    code, out, _ = invoke(capsys, ["geometry", "--in", path])
    assert code == EXIT_OK
    pr = records.profile_from_record(records.loads(out)[0])
    assert pr.max_slope <= 1 + 1e-9


def test_geometry_cloud_and_plot(capsys):
    code, out, _ = invoke(capsys, ["geometry", "--cloud", "4"])
    assert code == EXIT_OK
    assert len(out.splitlines()) == 16
    code, out, _ = invoke(capsys, ["geometry", "--format", "plot", "--grid", "64"])
    assert code == EXIT_OK
    rows = [list(map(float, line.split())) for line in out.splitlines()]
    assert len(rows) == 64 and all(len(r) == 2 for r in rows)


def test_invariant_violation_exit(capsys, tmp_path):
    # a tolerance below the achievable residual trips the checklist
    p = forward_map(trig(sin={1: 0.3}), OperatorSpec(1, 1.0, 1.0)).p
    path = write(tmp_path, "p.rec", [records.periodic_fn_record(p)])
    code, out, err = invoke(capsys, ["invert-riccati", "--in", path, "--e-nu", "1", "--tol", "1e-30"])
    assert code == EXIT_INVARIANT
    assert "invariant violated" in err
    assert records.find(records.loads(out), "checklist")


@pytest.mark.parametrize("content", ["garbage line\n", "kind = periodic_fn\nsamples[] = 1 2 x\n", ""])
def test_malformed_input(capsys, tmp_path, content):
    path = tmp_path / "bad.rec"
    path.write_text(content)
    code, _, err = invoke(capsys, ["spectrum", "--in", str(path)])
    assert code == EXIT_INPUT
    assert err.startswith("error:")


def test_missing_file(capsys, tmp_path):
    code, _, _ = invoke(capsys, ["gapmap", "--in", str(tmp_path / "nope.rec")])
    assert code == EXIT_INPUT


def test_nonzero_mean_input(capsys, tmp_path):
    path = write(tmp_path, "q.rec", [records.periodic_fn_record(trig(cos={0: 0.5}))])
    code, _, _ = invoke(capsys, ["spectrum", "--in", path])
    assert code == EXIT_INPUT


def test_out_file(capsys, tmp_path):
    out = tmp_path / "o.rec"
    assert run(["verify", "--draws", "1", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert records.loads(out.read_text())[0].kind == "estimate_report"
