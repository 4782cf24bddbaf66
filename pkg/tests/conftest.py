import pytest

from dualadmit import duality


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    """Keep the free-algebra disk cache inside a temporary directory."""
    old = duality._cache_dir
    duality.set_cache_dir(tmp_path_factory.mktemp("cache"))
    yield
    duality.set_cache_dir(old)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for ac in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[ac])
