import pathlib
import time

import pytest

import cyclebound as cb
from cyclebound.analysis import compare
from cyclebound.critfind import find_critical_points
from cyclebound.cycledetect import detect_limit_cycles

SYSTEMS_DIR = pathlib.Path(__file__).resolve().parent.parent / "systems"
CORPUS = [
    "cubic-one-cycle",
    "van-der-pol",
    "linear-center",
    "two-cycle",
    "degenerate-demo",
]


@pytest.fixture(scope="session")
def corpus():
    return {name: cb.load_vf(SYSTEMS_DIR / f"{name}.vf") for name in CORPUS}


@pytest.fixture(scope="session")
def corpus_cps(corpus):
    return {name: find_critical_points(v) for name, v in corpus.items()}


@pytest.fixture(scope="session")
def corpus_cycles(corpus, corpus_cps):
    return {
        name: detect_limit_cycles(corpus[name], corpus_cps[name])
        for name in CORPUS
    }


@pytest.fixture(scope="session")
def vdp_period():
    from oracles import vdp_period_reference

    return vdp_period_reference()


@pytest.fixture(scope="session")
def corpus_reports(corpus):
    """Full pipeline reports plus wall time, one fresh run per system."""
    out = {}
    for name, v in corpus.items():
        t0 = time.perf_counter()
        rep = compare(v)
        out[name] = (rep, time.perf_counter() - t0)
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of the run."""
    rows = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid:
                tail = nodeid.split("test_criterion_", 1)[1]
                num = int(tail.split("_", 1)[0])
                label = "PASS" if status == "passed" else "FAIL"
                rows[num] = (label, tail.split("_", 1)[1] if "_" in tail else "")
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for num in sorted(rows):
            label, name = rows[num]
            terminalreporter.write_line(
                f"criterion {num:2d} [{name.replace('_', ' ')}]: {label}")
