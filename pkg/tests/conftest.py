import os
import sys

import pytest

HERE = os.path.dirname(__file__)
FIXTURES = os.path.join(HERE, "fixtures")
sys.path.insert(0, HERE)

_RESULTS = {}

# the directed-vs-coverage ablation shared by the acceptance and bench tests
ABLATION_PROGRAMS = ("b_nested_k8", "d_deep_call")
ABLATION_TRIALS = 10
ABLATION_TIMEOUT = 300.0


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def fixture_path(*parts):
    return os.path.join(FIXTURES, *parts)


@pytest.fixture(scope="session")
def suite_dir(tmp_path_factory):
    from difuzz.bench import write_suite
    d = tmp_path_factory.mktemp("suite")
    write_suite(str(d))
    return str(d)


def suite_config(suite_dir, names, **kw):
    from difuzz.bench import BenchConfig, BenchProgram
    progs = [BenchProgram(n, os.path.join(suite_dir, n), os.path.join(suite_dir, n, "targets.tsv"))
             for n in names]
    return BenchConfig(progs, **kw)


@pytest.fixture(scope="session")
def ablation(suite_dir, tmp_path_factory):
    """10 exec-clock trials per mode on the two hardest suite programs."""
    from difuzz.bench import run_bench
    out = str(tmp_path_factory.mktemp("ablation"))
    cfg = suite_config(suite_dir, ABLATION_PROGRAMS, trials=ABLATION_TRIALS, clock="exec",
                       timeout_s=ABLATION_TIMEOUT, t_exploit=5.0)
    return run_bench(cfg, out_dir=out), out


@pytest.fixture
def record():
    """``record(criterion, passed, detail)`` for the acceptance summary."""
    def _record(n, passed, detail=""):
        _RESULTS[n] = (bool(passed), detail)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok, detail = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
