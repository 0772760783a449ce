import numpy as np
import pytest


def random_spd(rng, d, n=None):
    n = n or 2 * d + 3
    A = rng.standard_normal((n, d))
    return A.T @ A


def random_pair(rng, d):
    from geotransfer import GramPair

    return GramPair(random_spd(rng, d), random_spd(rng, d))


def simplex_grid(k, step):
    """All points of the k-simplex whose coordinates are multiples of ``step``."""
    m = int(round(1 / step))
    if k == 2:
        a = np.arange(m + 1) / m
        return np.column_stack([a, 1 - a])
    if k == 3:
        pts = [(i, j, m - i - j) for i in range(m + 1) for j in range(m + 1 - i)]
        return np.array(pts, dtype=float) / m
    pts = [(i, j, l, m - i - j - l) for i in range(m + 1) for j in range(m + 1 - i)
           for l in range(m + 1 - i - j)]
    return np.array(pts, dtype=float) / m


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance criteria summary ----------------------------------------------------


def pytest_configure(config):
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    number, title = mark.args
    entry = item.config._criteria.setdefault(number, {"title": title, "ok": True, "notes": []})
    entry["ok"] = entry["ok"] and report.passed
    entry["notes"].extend(str(v) for k, v in item.user_properties if k == "detail")
    if not report.passed:
        entry["notes"].append(f"{item.name} failed")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    criteria = getattr(config, "_criteria", {})
    if not criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(criteria):
        entry = criteria[number]
        status = "PASS" if entry["ok"] else "FAIL"
        notes = "; ".join(entry["notes"])
        terminalreporter.write_line(f"criterion {number} [{status}] {entry['title']}: {notes}")
