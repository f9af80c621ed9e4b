import pytest

from infogeo.verify import CheckResult, run_suites, suite_names


def test_suite_names_cover_modules():
    names = suite_names()
    for expected in ("deformed", "grid", "measure", "sobolev", "manifold",
                     "geometry", "filter", "diagnostics"):
        assert expected in names


def test_substring_filter():
    results = run_suites("grid")
    assert results
    assert all(r.suite == "grid" for r in results)


def test_unknown_filter_rejected():
    with pytest.raises(ValueError):
        run_suites("no_such_suite")


def test_full_battery_passes():
    """Every registered invariant holds; failures print their details."""
    results = run_suites()
    bad = [r for r in results if not r.ok]
    assert not bad, "\n".join(f"{r.suite}: {r.name}: {r.detail}" for r in bad)
    assert len(results) >= 30


def test_result_record_shape():
    res = run_suites("sobolev")[0]
    assert isinstance(res, CheckResult)
    assert res.suite == "sobolev"
    assert isinstance(res.name, str)
