import os
import sys
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def run_corpus(name: str, theta: float = 25.0, mode: str = "truly", nstar=None):
    from frontmesh import load_corpus
    from frontmesh.pipeline import mesh_pslg
    return mesh_pslg(load_corpus(name), theta, mode, nstar=nstar)


@pytest.fixture(scope="session")
def corpus_run():
    return run_corpus


ACCEPTANCE: dict = {}


def record(criterion: int, ok: bool, detail: str = "") -> bool:
    """Remember one acceptance verdict; a criterion fails if any of its checks fail."""
    prev = ACCEPTANCE.get(criterion)
    if prev is None:
        ACCEPTANCE[criterion] = [ok, [detail] if detail else []]
    else:
        prev[0] = prev[0] and ok
        if detail:
            prev[1].append(detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, details = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {'; '.join(details)}")
