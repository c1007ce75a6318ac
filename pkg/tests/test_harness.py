import json
import math

import numpy as np
import pytest

from qrc import cli
from qrc.config import (
    EXPERIMENTS,
    ExperimentConfig,
    build_config,
    parse_config_text,
    replace_config,
)
from qrc.errors import ValidationError
from qrc.experiments import (
    check_fading_memory,
    classification_split,
    peak_envelope,
    run_experiment,
    write_csv,
    write_outputs,
)

# a light classification setup so harness tests stay quick
FAST = {"n_segments": "16", "washout": "10", "n_neurons": "4"}


# configuration

def test_parse_config_text():
    vals = parse_config_text("""
        # comment line
        g = 2.5   # trailing comment
        n-neurons = 8
        strict = yes
        zeno_gz = 0.1, 4
        u_min = auto
    """)
    assert vals == {"g": 2.5, "n_neurons": 8, "strict": True, "zeno_gz": [0.1, 4.0], "u_min": None}


@pytest.mark.parametrize("text", ["bogus = 1", "g 2", "n_neurons = 2.5", "strict = maybe",
                                  "g = abc"])
def test_parse_config_rejects(text):
    with pytest.raises(ValidationError):
        parse_config_text(text)


def test_precedence_and_experiment_check():
    cfg = build_config("classify", {"g": 2.0, "seed": 3}, {"g": "4"})
    assert cfg.g == 4.0 and cfg.seed == 3
    with pytest.raises(ValidationError):
        build_config("nope")
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="nope")


def test_config_hash_ignores_output_location():
    a = build_config("classify")
    assert a.config_hash() == replace_config(a, out="/elsewhere", workers=4).config_hash()
    assert a.config_hash() != replace_config(a, seed=1).config_hash()


@pytest.mark.parametrize("name", ["classify", "mgts-forecast", "oscillator-forecast"])
def test_default_reservoirs_forget_their_start(name):
    assert check_fading_memory(build_config(name).reservoir()) < 1e-3


# output formats

def test_csv_and_summary_format(tmp_path):
    cfg = build_config("zeno-demo", {}, {"zeno_samples": "5", "out": str(tmp_path)})
    result = run_experiment(cfg)
    csv_path, json_path = write_outputs(result, tmp_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == f"# qrc zeno-demo config_sha256={cfg.config_hash()}"
    assert lines[1] == "time,gz,expectation"
    assert len(lines) == 2 + 2 * 5
    for line, row in zip(lines[2:], result.rows):
        assert [float(v) for v in line.split(",")] == [float(v) for v in row]
    summary = json.loads(json_path.read_text())
    assert list(summary) == ["experiment", "config_hash", "config", "metrics",
                             "wall_clock_s", "warnings"]
    assert summary["config"]["zeno_samples"] == 5
    assert all(math.isfinite(v) for v in summary["metrics"].values())


def test_reals_round_trip(tmp_path):
    result = run_experiment(build_config("zeno-demo", {}, {"zeno_samples": "9"}))
    write_csv(result, tmp_path / "z.csv")
    back = np.loadtxt(tmp_path / "z.csv", delimiter=",", skiprows=2)
    assert np.array_equal(back, np.array(result.rows, dtype=float))


# physics demos

def test_zeno_without_drive_stays_ground():
    r = run_experiment(build_config("zeno-demo", {}, {"zeno_gz": "0,1", "zeno_samples": "11"}))
    flat = r.column("expectation")[r.column("gz") == 0]
    assert np.all(np.abs(flat) <= 1e-15)


def test_zeno_rabi_limit():
    r = run_experiment(build_config("zeno-demo", {}, {
        "g": "0", "kappa": "0", "zeno_beta": "0", "zeno_gz": "1,3", "zeno_samples": "101"}))
    t, gz, e = r.column("time"), r.column("gz"), r.column("expectation")
    assert np.max(np.abs(e - np.sin(gz * t) ** 2)) <= 1e-6


def test_zeno_needs_two_values():
    with pytest.raises(ValidationError):
        run_experiment(build_config("zeno-demo", {}, {"zeno_gz": "1"}))


def test_beta_sweep_rows():
    r = run_experiment(build_config("beta-sweep", {}, {"beta_stop": "3", "beta_step": "1.5"}))
    assert r.columns == ["beta", "P_0_0", "P_0_1", "P_1_0", "P_1_1", "P_2_0", "P_2_1"]
    P = np.array(r.rows)[:, 1:]
    assert P.shape == (3, 6)
    # undriven cavity stays empty; the atom drive may still move the spin
    assert abs(P[0, :2].sum() - 1) <= 1e-6 and np.all(np.abs(P[0, 2:]) <= 1e-6)
    assert np.all(P.sum(axis=1) <= 1 + 1e-8)
    r = run_experiment(build_config("beta-sweep", {}, {"beta_stop": "0", "g_z": "0"}))
    assert r.rows[0][1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.abs(r.rows[0][2:]) <= 1e-6)


# classification plumbing

def test_split_respects_segments():
    cfg = build_config("classify", {}, {"n_segments": "15"})
    n = classification_split(cfg)
    assert n == 10
    assert 1 <= classification_split(replace_config(cfg, train_fraction=0.01)) < 15


def test_classify_outputs(tmp_path):
    r = run_experiment(build_config("classify", {}, {**FAST, "check_memory": "0"}))
    offset = classification_split(build_config("classify", {}, FAST)) * 8
    assert r.column("sample")[0] == offset
    assert set(r.column("target")) <= {0.0, 1.0}
    assert 0 <= r.summary.metrics["accuracy"] <= 100


def test_classify_is_byte_reproducible(tmp_path):
    paths = []
    for k in range(2):
        cfg = build_config("classify", {}, {**FAST, "check_memory": "0"})
        paths.append(write_outputs(run_experiment(cfg), tmp_path / str(k))[0])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_parallel_sweep_matches_sequential():
    over = {**FAST, "check_memory": "0", "gz_grid": "2,5,9", "n_segments": "12"}
    seq = run_experiment(build_config("gz-sweep", {}, over))
    par = run_experiment(build_config("gz-sweep", {}, {**over, "workers": "2"}))
    assert seq.rows == par.rows


def test_base_config_without_fading_memory_is_rejected():
    with pytest.raises(ValidationError, match="fading memory"):
        run_experiment(build_config("classify", {}, {**FAST, "t_input": "0.05", "g": "1"}))


# forecasting plumbing

def test_zero_length_forecast(tmp_path):
    cfg = build_config("mgts-forecast", {}, {"forecast_length": "0", "train_length": "120",
                                             "check_memory": "0"})
    r = run_experiment(cfg)
    assert r.rows == []
    csv_path, _ = write_outputs(r, tmp_path)
    assert csv_path.read_text().splitlines()[1] == "step,truth,prediction"


def test_peak_envelope():
    y = np.cos(2 * np.pi * np.arange(150) / 50) * np.exp(-0.01 * np.arange(150))
    peaks = peak_envelope(y, 50.0, 3)
    np.testing.assert_allclose(peaks, np.exp(-0.01 * np.array([0, 50, 100])))
    assert peak_envelope(y, 50.0, 5).size == 3


# command line

def write_conf(tmp_path, text=""):
    p = tmp_path / "run.conf"
    p.write_text(text)
    return str(p)


def test_cli_success(tmp_path, capsys):
    conf = write_conf(tmp_path, "zeno_samples = 5\n")
    code = cli.main(["zeno-demo", "--config", conf, "--out", str(tmp_path / "o"), "--seed", "9"])
    assert code == 0
    summary = json.loads((tmp_path / "o" / "zeno-demo.summary.json").read_text())
    assert summary["config"]["seed"] == 9


def test_cli_override_beats_file(tmp_path):
    conf = write_conf(tmp_path, "zeno_samples = 5\n")
    assert cli.main(["zeno-demo", "--config", conf, "--out", str(tmp_path), "zeno_samples=3"]) == 0
    assert len((tmp_path / "zeno-demo.csv").read_text().splitlines()) == 2 + 2 * 3


@pytest.mark.parametrize("extra", [["bogus=1"], ["g=-1"], ["notakeyvalue"]])
def test_cli_invalid_input(tmp_path, extra):
    conf = write_conf(tmp_path)
    assert cli.main(["zeno-demo", "--config", conf, "--out", str(tmp_path), *extra]) == 2


def test_cli_missing_config(tmp_path):
    assert cli.main(["zeno-demo", "--config", str(tmp_path / "missing.conf")]) == 2


def test_cli_unknown_experiment(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["warp-drive", "--config", write_conf(tmp_path)])
    assert exc.value.code == 2


def test_cli_strict_truncation_is_numerical_failure(tmp_path):
    conf = write_conf(tmp_path, "n_fock = 4\nn_neurons = 8\nbeta_stop = 15\nbeta_step = 5\n")
    args = ["beta-sweep", "--config", conf, "--out", str(tmp_path)]
    assert cli.main(args) == 0
    summary = json.loads((tmp_path / "beta-sweep.summary.json").read_text())
    assert any(w.startswith("TruncationWarning") for w in summary["warnings"])
    assert cli.main(args + ["--strict"]) == 3
