import functools

import pytest
from hypothesis import HealthCheck, settings

from nilpotwo import construct
from nilpotwo import table_group as tg

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def small_corpus():
    """Corpus groups of order <= 256 with their tables and full subgroup lists."""
    out = []
    for name, g in construct.builtin_corpus(max_order=256):
        table = tg.from_generated(g, cap=256)
        out.append((name, g, table, tg.enumerate_subgroups(table)))
    return tuple(out)


@pytest.fixture(scope="session")
def corpus_tables():
    return small_corpus()


@pytest.fixture(scope="session")
def acceptance_log():
    def record(n, ok, detail=""):
        _ACCEPTANCE[n] = (ok, detail)
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
