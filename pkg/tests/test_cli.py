import json

import numpy as np
import pytest

from clocksync import CrlbInputs, crlb_offset, crlb_skew
from clocksync.cli import main

HAND_CYCLE = {
    "alpha": 2.0,
    "beta": 1.0,
    "d": 1.0,
    "processing_delay": 1.0,
    "sigma2": 0.0,
    "n_rounds": 2,
    "inter_round_interval": 10.0,
}


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def _estimate_fields(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "method,alpha_hat,beta_hat,d_hat,residual_norm"
    fields = out[1].split(",")
    return fields[0], [float(v) for v in fields[1:]]


def test_simulate_writes_csv_and_sidecar(tmp_path, capsys):
    cfg = _write(tmp_path, "cycle.json", HAND_CYCLE)
    out = tmp_path / "cycle.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "round,t1,t2,t3,t4"
    assert lines[1] == "1,0,3,4,2.5"
    assert lines[2] == "2,10,23,24,12.5"
    sidecar = json.loads((tmp_path / "cycle.csv.json").read_text())
    assert sidecar["skew"] == 2.0
    assert "wrote" in capsys.readouterr().err


def test_simulate_then_estimate_raw(tmp_path, capsys):
    cfg = _write(tmp_path, "cycle.json", HAND_CYCLE)
    out = tmp_path / "cycle.csv"
    main(["simulate", "--config", str(cfg), "--out", str(out)])
    capsys.readouterr()
    assert main(["estimate", "--in", str(out), "--method", "raw"]) == 0
    method, values = _estimate_fields(capsys)
    assert method == "MLE_RAW"
    assert values[0] == pytest.approx(2.0, rel=1e-9)
    assert values[1] == pytest.approx(1.0, rel=1e-9)
    assert values[2] == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize(
    "flags,label",
    [
        (["--method", "svd"], "MLE_SVD"),
        (["--method", "svd", "--rank", "3"], "MLE_SVD"),
        (["--method", "lrma"], "MLE_LRMA"),
        (["--method", "lrma", "--tau", "0.5"], "MLE_LRMA"),
    ],
)
def test_estimate_denoised_variants(tmp_path, capsys, flags, label):
    noisy = dict(HAND_CYCLE, sigma2=1.0, n_rounds=20, alpha=1.005, processing_delay=0.2)
    cfg = _write(tmp_path, "cycle.json", noisy)
    out = tmp_path / "cycle.csv"
    main(["simulate", "--config", str(cfg), "--out", str(out)])
    capsys.readouterr()
    assert main(["estimate", "--in", str(out)] + flags) == 0
    method, values = _estimate_fields(capsys)
    assert method == label
    assert values[0] == pytest.approx(1.005, abs=0.2)


def test_crlb_matches_the_library(tmp_path, capsys):
    payload = {"alpha": 1.005, "beta": 3.0, "d": 5.0, "sigma2": 1.0, "n_rounds": 10}
    cfg = _write(tmp_path, "crlb.json", payload)
    assert main(["crlb", "--config", str(cfg)]) == 0
    printed = json.loads(capsys.readouterr().out)
    t1 = np.arange(10, dtype=np.float64)
    t3 = 1.005 * (t1 + 5.0) + 3.0 + 0.2
    inputs = CrlbInputs(alpha=1.005, beta=3.0, d=5.0, sigma2=1.0, t1=t1, t3=t3)
    assert printed["crlb_skew"] == pytest.approx(crlb_skew(inputs), rel=1e-12)
    assert printed["crlb_offset"] == pytest.approx(crlb_offset(inputs), rel=1e-12)


def test_experiment_end_to_end_and_deterministic(tmp_path, capsys):
    cfg = _write(
        tmp_path, "exp.json", {"trials": 8, "n_rounds_grid": [10], "master_seed": 77}
    )
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    assert main(["experiment", "--config", str(cfg), "--out-dir", str(dir_a)]) == 0
    assert main(["experiment", "--config", str(cfg), "--out-dir", str(dir_b)]) == 0
    err = capsys.readouterr().err
    assert "experiment done" in err
    for name in ("results.csv", "results.json", "curves.svg", "run_meta.json"):
        assert (dir_a / name).exists()
    assert (dir_a / "results.csv").read_bytes() == (dir_b / "results.csv").read_bytes()


def test_experiment_fixed_params_flag(tmp_path, capsys):
    cfg = _write(
        tmp_path, "exp.json", {"trials": 4, "n_rounds_grid": [10], "master_seed": 3}
    )
    out_dir = tmp_path / "fixed"
    code = main(
        ["experiment", "--config", str(cfg), "--out-dir", str(out_dir),
         "--fixed-params", "1.005", "3.0", "5.0"]
    )
    assert code == 0
    capsys.readouterr()
    meta = json.loads((out_dir / "run_meta.json").read_text())
    assert meta["config"]["fixed_params"] == [1.005, 3.0, 5.0]


def test_unknown_config_field_fails_cleanly(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", dict(HAND_CYCLE, flux_capacitor=1))
    out = tmp_path / "x.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 1
    assert capsys.readouterr().err.startswith("error:")
    assert not out.exists()


def test_malformed_json_fails_cleanly(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    assert main(["crlb", "--config", str(cfg)]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_missing_input_file_fails_cleanly(tmp_path, capsys):
    assert main(["estimate", "--in", str(tmp_path / "nope.csv"), "--method", "raw"]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_foreign_csv_header_fails_cleanly(tmp_path, capsys):
    path = tmp_path / "foreign.csv"
    path.write_text("x,y\n1,2\n")
    assert main(["estimate", "--in", str(path), "--method", "raw"]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_method_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--in", "x.csv", "--method", "newton"])
    assert exc.value.code == 2


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
