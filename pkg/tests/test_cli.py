import json
import math

import pytest

from hankellab.cli import main


def run(args):
    return main(args)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def test_coeff_discrete(tmp_path):
    out = tmp_path / "coeff.json"
    code = run(
        ["coeff", "--alpha", "1", "--b1", "1", "--bm1", "0", "--out", str(out)]
    )
    assert code == 0
    rep = read_json(out)
    assert rep["c_plus"] == pytest.approx(0.5, abs=1e-12)
    assert rep["c_minus"] == 0.0
    assert rep["version"]
    assert rep["config"]["alpha"] == 1.0


def test_coeff_zero(tmp_path):
    out = tmp_path / "c.json"
    assert run(["coeff", "--alpha", "2", "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["c_plus"] == 0.0 and rep["c_minus"] == 0.0


def test_coeff_matrix_file(tmp_path):
    mat = tmp_path / "m.json"
    mat.write_text(
        json.dumps({"alpha": 1.0, "b0": [[1.0, 0.0], [0.0, 1.0]], "binf": [[0.0, 0.0], [0.0, 0.0]]})
    )
    out = tmp_path / "cm.json"
    assert run(["coeff", "--alpha", "1", "--matrix", str(mat), "--out", str(out)]) == 0
    assert read_json(out)["c_plus"] == pytest.approx(1.0, abs=1e-12)


def test_spectrum_delta_and_determinism(tmp_path):
    spec = '{"type": "power", "gamma": 2.0}'
    p1 = tmp_path / "a"
    p2 = tmp_path / "b"
    for prefix in (p1, p2):
        code = run(
            [
                "spectrum",
                "--kernel",
                spec,
                "--N",
                "128",
                "--method",
                "dense",
                "--out-prefix",
                str(prefix),
            ]
        )
        assert code == 0
    csv1 = (tmp_path / "a.csv").read_bytes()
    csv2 = (tmp_path / "b.csv").read_bytes()
    assert csv1 == csv2
    j1 = read_json(tmp_path / "a.json")
    j2 = read_json(tmp_path / "b.json")
    j1.pop("runtime_s"), j2.pop("runtime_s")
    j1["config"].pop("out_prefix"), j2["config"].pop("out_prefix")
    assert j1 == j2


def test_spectrum_lanczos(tmp_path):
    code = run(
        [
            "spectrum",
            "--kernel",
            '{"type": "discrete_model", "alpha": 1.0, "b1": 1.0, "bm1": 0.0}',
            "--N",
            "16384",
            "--method",
            "lanczos",
            "--k",
            "8",
            "--tol",
            "1e-7",
            "--out-prefix",
            str(tmp_path / "s"),
        ]
    )
    assert code == 0
    lines = (tmp_path / "s.csv").read_text().strip().splitlines()
    assert lines[0] == "n,lambda_plus,residual_plus,lambda_minus,residual_minus"
    assert len(lines) >= 9


def test_fit_roundtrip(tmp_path):
    import numpy as np

    rows = ["n,lambda_plus,residual_plus,lambda_minus,residual_minus"]
    for n in range(1, 1025):
        rows.append(f"{n},{0.5 / n!r},0.0,,")
    csv = tmp_path / "spec.csv"
    csv.write_text("\n".join(rows) + "\n")
    out = tmp_path / "fit.json"
    code = run(
        [
            "fit",
            "--csv",
            str(csv),
            "--alpha",
            "1",
            "--n1",
            "64",
            "--n2",
            "512",
            "--c-plus",
            "0.5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rep = read_json(out)
    assert rep["c_hat_plus"] == pytest.approx(0.5, abs=1e-11)
    assert rep["rel_dev_plus"] < 1e-10


def test_verify_hs(tmp_path):
    code = run(
        [
            "verify-hs",
            "--kernel",
            '{"type": "discrete_model", "alpha": 1.0, "b1": 1.0, "bm1": 0.5}',
            "--N",
            "256",
            "--out",
            str(tmp_path / "hs.json"),
        ]
    )
    assert code == 0
    assert read_json(tmp_path / "hs.json")["pass"] is True


def test_verify_laplace(tmp_path):
    out = tmp_path / "lap.csv"
    code = run(
        [
            "verify-laplace",
            "--alpha",
            "1",
            "--m",
            "0",
            "--c",
            "0.5",
            "--side",
            "down",
            "--t",
            "100,10000,1000000",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert out.read_text().startswith("t,value,predicted,ratio,deviation,log_band")


def test_widom(tmp_path):
    out = tmp_path / "w.json"
    assert run(["widom", "--gamma", "2", "--N", "512", "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["pass"] is True
    assert rep["predicted"] == pytest.approx(2 * math.pi, rel=1e-12)


def test_spectrum_continuous_kernel(tmp_path):
    code = run(
        [
            "spectrum",
            "--kernel",
            '{"type": "continuous_model", "alpha": 1.0, "b0": 1.0, "binf": 1.0}',
            "--N",
            "128",
            "--grid-l",
            "8.0",
            "--out-prefix",
            str(tmp_path / "cont"),
        ]
    )
    assert code == 0
    summary = read_json(tmp_path / "cont.json")
    assert summary["N"] == 128
    assert summary["resolved_plus"] > 3


def test_usage_error_exit_code():
    assert run(["coeff"]) == 2  # missing --alpha
    assert run(["spectrum", "--N", "16"]) == 2  # no kernel


def test_nonconvergence_exit_code(tmp_path):
    # a tiny iteration cap cannot converge 64 eigenvalues of a kernel
    # with a rich two-sided spectrum
    import json as _json

    import numpy as np

    rng = np.random.default_rng(3)
    vals = rng.standard_normal(1023) * (np.arange(1023) + 1.0) ** -0.75
    spec = {"type": "discrete_model", "alpha": 1.0, "b1": 1.0, "bm1": 0.0,
            "overrides": [[int(j), float(v)] for j, v in enumerate(vals[:400])]}
    code = run(
        [
            "spectrum",
            "--kernel",
            _json.dumps(spec),
            "--N",
            "512",
            "--method",
            "lanczos",
            "--k",
            "64",
            "--tol",
            "1e-12",
            "--max-iter",
            "20",
            "--out-prefix",
            str(tmp_path / "nc"),
        ]
    )
    assert code == 3


def test_study_jobs_parallel(tmp_path):
    out = tmp_path / "study2.json"
    code = run(
        [
            "study",
            "--alpha",
            "1",
            "--b1",
            "1",
            "--bm1",
            "0",
            "--sizes",
            "128,256",
            "--jobs",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert read_json(out)["interlacing_ok"] is True


def test_study(tmp_path):
    out = tmp_path / "study.json"
    code = run(
        [
            "study",
            "--alpha",
            "1",
            "--b1",
            "1",
            "--bm1",
            "0",
            "--sizes",
            "128,256,512",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rep = read_json(out)
    assert rep["interlacing_ok"] is True
