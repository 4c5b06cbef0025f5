import contextlib
import io
import json
import os
import shutil
import subprocess
import sys

import pytest

from conewave.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, THREADS_ENV, main, worker_count
from conewave.config import COMMANDS

from cli_cases import QUICK_ARGS


def run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, json.loads(buf.getvalue())


def outputs(path):
    return {name: (path / name).read_bytes() for name in sorted(os.listdir(path))}


def test_quick_cases_cover_all_commands():
    assert set(QUICK_ARGS) == set(COMMANDS)


@pytest.mark.parametrize("command", COMMANDS)
def test_deterministic(tmp_path, command):
    a, b = tmp_path / "a", tmp_path / "b"
    code_a, _ = run([command, "--out", str(a), "--seed", "11", *QUICK_ARGS[command]])
    code_b, _ = run([command, "--out", str(b), "--seed", "11", *QUICK_ARGS[command]])
    assert code_a == code_b
    files_a, files_b = outputs(a), outputs(b)
    assert files_a.keys() == files_b.keys()
    for name in files_a:
        if name == "config-echo.json":
            continue  # names its own output directory
        assert files_a[name] == files_b[name], name


def test_config_echo_reparses(tmp_path):
    from conewave.config import validate_config
    run(["hardy", "--out", str(tmp_path), *QUICK_ARGS["hardy"]])
    echo = json.loads((tmp_path / "config-echo.json").read_text())
    assert echo["command"] == "hardy" and echo["params"]["ensemble_size"] == 4
    # the echoed values re-validate to the same echo
    text = [f"command = hardy", f"seed = {echo['seed']}", f"output = {echo['output']}"]
    text += ["[hardy]"] + [f"{k} = {v}" for k, v in echo["params"].items()]
    text += ["[discretization]"] + [f"{k} = {v}" for k, v in echo["discretization"].items()]
    text += ["[geometry]"] + [f"{k} = {v}" for k, v in echo["geometry"].items()]
    again = validate_config("\n".join(text) + "\n")
    assert again.echo_json() == (tmp_path / "config-echo.json").read_text()


def test_csv_format(tmp_path):
    run(["propagate", "--out", str(tmp_path), *QUICK_ARGS["propagate"]])
    raw = (tmp_path / "propagate.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "t,r,y_index,re_u,im_u"
    float(lines[1].split(",")[3])


def test_summary_is_single_object(tmp_path):
    code, summary = run(["dispersive-scan", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert abs(summary["slope"] + 1.5) < 0.05 and summary["pass"] is True
    assert json.loads((tmp_path / "summary.json").read_text()) == summary


def test_non_admissible_pair_exit_one(tmp_path):
    code, summary = run(["strichartz", "--out", str(tmp_path), "--q", "3", "--r", "3",
                         *QUICK_ARGS["strichartz"]])
    assert code == EXIT_ERROR
    assert summary["error"] == "NonAdmissiblePair" and summary["pass"] is False


def test_beta_rejected_before_running(tmp_path):
    code, summary = run(["local-smoothing", "--out", str(tmp_path), "--beta", "0.4"])
    assert code == EXIT_ERROR
    assert summary["error"] == "ConstraintViolation"
    assert "1/2 < beta" in summary["message"]
    assert not (tmp_path / "summary.json").exists()


def test_failed_estimate_exit_two(tmp_path):
    # a coarse resolvent grid is not yet resolution-stable
    code, summary = run(["resolvent", "--out", str(tmp_path), *QUICK_ARGS["resolvent"]])
    assert code == EXIT_FAILED and summary["pass"] is False


def test_diagnostic_only_scatter(tmp_path):
    code, summary = run(["scatter", "--out", str(tmp_path), "--gamma", "-1",
                         *QUICK_ARGS["scatter"]])
    assert code == EXIT_OK
    assert summary["pass"] is None and summary["diagnostic_only"] is True


def test_config_file_and_mismatch(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = hardy\nseed = 3\n[hardy]\ns = 0.5\nensemble_size = 3\n"
                   "[discretization]\nR_max = 64\nN = 96\n")
    code, summary = run(["hardy", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == EXIT_OK and summary["params"]["s"] == 0.5
    code, summary = run(["strichartz", "--config", str(cfg), "--out", str(tmp_path / "p")])
    assert code == EXIT_ERROR and summary["error"] == "ConstraintViolation"


def test_duplicate_key_in_file(tmp_path):
    cfg = tmp_path / "dup.cfg"
    cfg.write_text("command = hardy\n[hardy]\ns = 1\ns = 0.5\n")
    code, summary = run(["hardy", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == EXIT_ERROR and "lines 3 and 4" in summary["message"]


def test_missing_config_file(tmp_path):
    code, summary = run(["hardy", "--config", str(tmp_path / "nope.cfg")])
    assert code == EXIT_ERROR and summary["error"] == "FileNotFoundError"


def test_thread_cap(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert worker_count(4) == 4
    monkeypatch.setenv(THREADS_ENV, "2")
    assert worker_count(4) == 2 and worker_count(1) == 1
    monkeypatch.setenv(THREADS_ENV, "0")
    assert worker_count(4) == 1


def test_workers_do_not_change_results(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")
    args = QUICK_ARGS["strichartz"]
    run(["strichartz", "--out", str(tmp_path / "one"), "--workers", "1", *args])
    run(["strichartz", "--out", str(tmp_path / "three"), "--workers", "3", *args])
    for name in ("strichartz.csv", "summary.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "three" / name).read_bytes()


def test_console_script(tmp_path):
    exe = shutil.which("conewave")
    cmd = [exe] if exe else [sys.executable, "-m", "conewave.cli"]
    proc = subprocess.run(cmd + ["modes", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["nu0"] == 0.5


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as info, contextlib.redirect_stderr(io.StringIO()):
        main(["hardy", "--no-such-flag", "1"])
    assert info.value.code == EXIT_ERROR


def test_band_limit_reported(tmp_path):
    code, summary = run(["propagate", "--out", str(tmp_path), *QUICK_ARGS["propagate"]])
    assert code == EXIT_OK
    assert summary["resolved"] == (summary["band_tail_fraction"] < 1e-8)
    _, summary = run(["nls", "--out", str(tmp_path / "n"), *QUICK_ARGS["nls"]])
    assert "resolved" in summary
