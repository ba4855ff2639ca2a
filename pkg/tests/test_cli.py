import os

import pytest

from risbeam.cli import main

FAST_SWEEP = """
[channel]
tau_g = 0.5
[sweep]
family = se_vs_snr
values = 5, 10
models = far, piecewise
k_values = 2
trials = 2
"""

TINY = """
[channel]
tau_g = 0.5
model = far
[sweep]
family = se_vs_snr
values = 10
models = far
k_values = 1
trials = 1
[solver]
r_max = 30
"""


def write_cfg(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_validate_default_config_exits_zero(tmp_path):
    # empty config = all defaults; keep the solve short for the suite
    cfg = write_cfg(tmp_path, "[solver]\nr_max = 10\n")
    assert main(["validate", "--config", cfg]) == 0


def test_validate_echo_roundtrip(tmp_path, capsys):
    cfg = write_cfg(tmp_path, FAST_SWEEP)
    assert main(["validate", "--config", cfg, "--echo"]) == 0
    echoed = capsys.readouterr().out
    cfg2 = write_cfg(tmp_path, echoed, name="echo.ini")
    assert main(["validate", "--config", cfg2, "--echo"]) == 0
    assert capsys.readouterr().out == echoed


def test_bad_config_exit_code_1(tmp_path):
    cfg = write_cfg(tmp_path, "[channel]\ntau_g = 2.0\n")
    assert main(["run", "--config", cfg]) == 1


def test_unknown_key_exit_code_1(tmp_path):
    cfg = write_cfg(tmp_path, "[system]\nnot_a_key = 1\n")
    assert main(["run", "--config", cfg]) == 1


def test_unwritable_output_dir_exit_code_3(tmp_path):
    cfg = write_cfg(tmp_path, TINY)
    rc = main(["run", "--config", cfg, "--out", "/dev/null/nope"])
    assert rc == 3


def test_run_writes_outputs_and_is_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, FAST_SWEEP)
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        rc = main(["run", "--config", cfg, "--seed", "7", "--out", str(out)])
        assert rc == 0
        records = (out / "records.csv").read_bytes()
        summary = (out / "summary.csv").read_bytes()
        assert (out / "effective-config.ini").exists()
        outs.append((records, summary))
    assert outs[0] == outs[1]


def test_run_seed_changes_results(tmp_path):
    cfg = write_cfg(tmp_path, TINY)
    blobs = []
    for seed, name in ((7, "s7"), (8, "s8")):
        out = tmp_path / name
        assert main(["run", "--config", cfg, "--seed", str(seed), "--out", str(out)]) == 0
        blobs.append((out / "records.csv").read_bytes())
    assert blobs[0] != blobs[1]


def test_trace_writes_per_iteration_csv(tmp_path):
    cfg = write_cfg(tmp_path, TINY)
    out = tmp_path / "tr"
    assert main(["trace", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0] == "outer_iter,objective,se_design,se_eval,adpm_iters,adpm_residual,eta"
    assert len(lines) >= 2


def test_threads_flag_accepted(tmp_path):
    cfg = write_cfg(tmp_path, TINY)
    out = tmp_path / "thr"
    assert main(["run", "--config", cfg, "--threads", "1", "--out", str(out)]) == 0
    assert (out / "records.csv").exists()


def test_convergence_run_writes_per_trial_traces(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "[channel]\ntau_g = 0.5\n"
        "[sweep]\nfamily = convergence\nvalues = 2.0\nmodels = far\nk_values = 1\ntrials = 2\n"
        "[solver]\nr_max = 20\n",
    )
    out = tmp_path / "conv"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    traces = sorted(p.name for p in out.glob("trace_*.csv"))
    assert traces == ["trace_far_K0_d_br_m2_t0.csv", "trace_far_K0_d_br_m2_t1.csv"]
    first = (out / traces[0]).read_text().splitlines()
    assert first[0].startswith("outer_iter,objective,se_design,se_eval")
    assert len(first) >= 2
