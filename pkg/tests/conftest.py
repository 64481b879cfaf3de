import functools

import pytest

from dipolechain import ChainConfig
from dipolechain.pipeline import run_scan, solve

_acceptance = {}


@functools.lru_cache(maxsize=None)
def cached_solve(cfg: ChainConfig):
    return solve(cfg)


@functools.lru_cache(maxsize=None)
def cached_scan(cfg: ChainConfig, grid_points: int = 3600):
    return run_scan(cfg, grid_points)


@pytest.fixture
def pair_quarter():
    return ChainConfig(n_atoms=2, spacing_over_lambda=0.25, driven_atom=1, rabi_over_gamma=0.02)


@pytest.fixture
def triple_quarter():
    return ChainConfig(n_atoms=3, spacing_over_lambda=0.25, driven_atom=1, rabi_over_gamma=0.02)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome
    elif report.when == "setup" and report.outcome != "passed" and "test_acceptance.py" in report.nodeid:
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda n: int(n.split("_")[1][2:]) if n.startswith("test_ac") else 99):
        verdict = "PASS" if _acceptance[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
