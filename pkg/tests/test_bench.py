import json
import math
import os

import pytest

from conftest import suite_config
from difuzz import cli
from difuzz.bench import (BenchConfig, BenchConfigError, BenchMatrix, BenchProgram, PipelineError,
                          TteCell, format_cell, gen_benchmark_suite, load_bench_config, prepare,
                          render_report, run_bench)
from difuzz.engine import FuzzConfig, fuzz_loop


# -- cells and reports -------------------------------------------------------------

def test_cell_statistics_with_a_timeout():
    cell = TteCell.from_trials([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, None])
    assert cell.best_s == 1.0 and cell.avg_s == 5.0 and cell.timeout_pct == 10
    # the timeout ranks last, so the median is the mean of the 5th and 6th values
    assert cell.median_s == 5.5 and cell.trials == 10


def test_single_trial_cell():
    cell = TteCell.from_trials([2.3])
    assert cell.best_s == cell.avg_s == 2.3 and cell.timeout_pct == 0


def test_median_is_timeout_when_most_trials_time_out():
    assert TteCell.from_trials([1.0, None, None]).median_s is None


def test_empty_cell_rejected():
    with pytest.raises(ValueError):
        TteCell.from_trials([])


def test_cell_formatting():
    assert format_cell(TteCell(0.5, 7.9, 0)) == "0.5 | 7.9"
    assert format_cell(TteCell(0.5, 7.9, 10)) == "0.5 | 7.9 (10% TO)"
    assert format_cell(TteCell(None, None, 90)) == "TO (90% TO)"
    assert format_cell(TteCell(None, None, 100)) == "TO (100% TO)"


def test_empty_matrix_reports_only_headers():
    m = BenchMatrix(("directed", "coverage"))
    text = render_report(m, "text").splitlines()
    assert len(text) == 2 and text[0].startswith("Target")
    assert render_report(m, "csv") == "target,mode,trials,best_s,avg_s,median_s,timeout_pct\n"
    assert json.loads(render_report(m, "json")) == {"modes": ["directed", "coverage"],
                                                    "cells": [], "trials": []}
    with pytest.raises(ValueError):
        render_report(m, "html")


def test_report_formats_agree():
    m = BenchMatrix(("directed",), ["t_1"])
    m.trials[("t_1", "directed")] = [0.25, None]
    m.cells[("t_1", "directed")] = TteCell.from_trials([0.25, None])
    assert "0.2 | 0.2 (50% TO)" in render_report(m, "text")
    assert render_report(m, "csv").splitlines()[1] == "t_1,directed,2,0.25,0.25,,50.0"
    doc = json.loads(render_report(m, "json"))
    assert doc["trials"] == [{"target": "t_1", "mode": "directed", "tte_s": [0.25, None]}]


# -- configuration -----------------------------------------------------------------

def _write_toml(tmp_path, body):
    path = tmp_path / "bench.toml"
    path.write_text(body)
    return str(path)


def test_load_bench_config_resolves_paths(tmp_path):
    path = _write_toml(tmp_path, 'trials = 3\nmodes = ["directed"]\n\n'
                                 '[[program]]\nname = "p"\nsource = "p"\n')
    cfg = load_bench_config(path)
    assert cfg.trials == 3 and cfg.modes == ("directed",)
    assert cfg.programs == [BenchProgram("p", str(tmp_path / "p"),
                                         str(tmp_path / "p" / "targets.tsv"))]
    over = load_bench_config(path, trials=1, jobs=None, clock="exec")
    assert over.trials == 1 and over.jobs == 1 and over.clock == "exec"


@pytest.mark.parametrize("body", [
    "trails = 3\n",
    '[[program]]\nname = "p"\n',
    "trials = 0\n",
    'modes = ["random"]\n',
    "timeout_s = -1.0\n",
])
def test_bad_bench_config(tmp_path, body):
    with pytest.raises(BenchConfigError):
        load_bench_config(_write_toml(tmp_path, body))


def test_empty_modes_rejected():
    with pytest.raises(BenchConfigError):
        BenchConfig([], modes=())


def test_pipeline_error_names_stage(tmp_path):
    src = tmp_path / "p"
    src.mkdir()
    (src / "main.mp").write_text("func main( {\n}\n")
    (src / "targets.tsv").write_text("p_1\tmain.mp:1\t10\n")
    with pytest.raises(PipelineError) as info:
        prepare("p", str(src), str(src / "targets.tsv"))
    assert info.value.stage == "load" and info.value.target == "p"

    (src / "main.mp").write_text("func main() {\n}\n")
    (src / "targets.tsv").write_text("p_1\tmain.mp:40\t10\n")
    with pytest.raises(PipelineError) as info:
        prepare("p", str(src), str(src / "targets.tsv"))
    assert info.value.stage == "preprocess"


# -- the suite ---------------------------------------------------------------------

def test_suite_is_reproducible():
    a, b = gen_benchmark_suite(), gen_benchmark_suite()
    assert [(p.name, p.files, p.magic) for p in a] == [(p.name, p.files, p.magic) for p in b]
    assert [p.name for p in a] == ["a_shallow", "b_nested_k2", "b_nested_k4", "b_nested_k8",
                                   "c_counter", "d_deep_call", "e_dead_code"]
    assert [p.reachable for p in a] == [True] * 6 + [False]


def test_nested_crash_carries_the_magic_bytes(suite_dir):
    prog = {p.name: p for p in gen_benchmark_suite()}["b_nested_k4"]
    src = os.path.join(suite_dir, prog.name)
    prep = prepare(prog.name, src, os.path.join(src, "targets.tsv"))
    res = fuzz_loop(prep.program, prep.ets,
                    FuzzConfig(timeout_s=60.0, clock="exec", rng_seed=3), prep.targets)
    assert res.target_id == "b_nested_k4_1"
    assert list(res.crash_input[:4]) == list(prog.magic)


def test_shallow_target_is_found_quickly(suite_dir):
    cfg = suite_config(suite_dir, ["a_shallow"], trials=3, timeout_s=5.0)
    m = run_bench(cfg)
    for mode in m.modes:
        cell = m.cell("a_shallow_1", mode)
        assert cell.timeout_pct == 0 and cell.best_s < 5.0


def _median(cell):
    return math.inf if cell.median_s is None else cell.median_s


@pytest.mark.slow
def test_difficulty_grows_with_nesting(suite_dir, ablation):
    from conftest import ABLATION_TIMEOUT, ABLATION_TRIALS
    matrix8, _ = ablation
    cfg = suite_config(suite_dir, ["b_nested_k2", "b_nested_k4"], modes=("directed",),
                       trials=ABLATION_TRIALS, clock="exec", timeout_s=ABLATION_TIMEOUT)
    m = run_bench(cfg)
    meds = [_median(m.cell("b_nested_k2_1", "directed")),
            _median(m.cell("b_nested_k4_1", "directed")),
            _median(matrix8.cell("b_nested_k8_1", "directed"))]
    assert meds == sorted(meds) and meds[0] < meds[2]


def test_cli_bench_smoke(tmp_path, capsys):
    suite = tmp_path / "suite"
    assert cli.main(["gen-suite", "-o", str(suite), "--timeout", "5"]) == 0
    assert (suite / "bench.toml").exists()
    # keep the smoke run small: only the shallow program
    (suite / "bench.toml").write_text('[[program]]\nname = "a_shallow"\nsource = "a_shallow"\n')
    out = tmp_path / "out"
    rc = cli.main(["bench", "--config", str(suite / "bench.toml"), "--trials", "1",
                   "--timeout", "0.2", "--clock", "exec", "-o", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "a_shallow_1" in text
    assert sorted(os.listdir(out)) == ["report.csv", "report.json", "report.txt", "trials"]
