import json
import subprocess


def run(bin_path, *args, env=None):
    proc = subprocess.run([bin_path, *args], capture_output=True, text=True, env=env)
    return proc.returncode, json.loads(proc.stdout)


def test_missing_input_is_a_config_error(pvsde_bin, tmp_path):
    code, out = run(pvsde_bin, "identify", "--out", str(tmp_path))
    assert code == 1
    assert out["error"] == "config"
    assert "input.pv" in out["message"]


def test_missing_file_is_an_io_error(pvsde_bin, tmp_path):
    code, out = run(pvsde_bin, "identify", "--pv", str(tmp_path / "nope.csv"), "--out", str(tmp_path))
    assert code == 1
    assert out["error"] == "io"


def test_bad_option_is_a_usage_error(pvsde_bin):
    code, out = run(pvsde_bin, "identify", "--bogus")
    assert code == 2
    assert out["error"] == "usage"


def test_bad_config_value(pvsde_bin, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("split = 2\n")
    code, out = run(pvsde_bin, "synth", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 1
    assert out["error"] == "config"


def test_synth_identify_and_thread_cap(pvsde_bin, tmp_path):
    import os

    cfg = tmp_path / "run.cfg"
    cfg.write_text("synth.days = 3\nsynth.start_date = 2019-06-01\n")
    env = dict(os.environ, PVSDE_THREADS="1")
    code, out = run(pvsde_bin, "synth", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "d"), env=env)
    assert code == 0, out
    assert out["command"] == "synth"
    assert out["threads"] == 1
    code, out = run(pvsde_bin, "identify", "--config", str(cfg), "--pv", str(tmp_path / "d" / "pv.csv"),
                    "--out", str(tmp_path / "id"), env=env)
    assert code == 0, out
    params = json.loads((tmp_path / "id" / "params.json").read_text())
    assert len([k for k in params if not k.startswith("_")]) == 3

    # Same seed, same bytes.
    run(pvsde_bin, "synth", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "d2"), env=env)
    assert (tmp_path / "d" / "pv.csv").read_bytes() == (tmp_path / "d2" / "pv.csv").read_bytes()
