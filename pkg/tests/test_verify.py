import json

import pytest

from dzlab.verify import VerifyReport, _Runner, run_suite

from conftest import tables_for


@pytest.mark.parametrize("spec", ["rational", "quad:5", "poly:1,0,0,-2"])
def test_suite_passes(spec):
    t = tables_for(spec, 10**5)
    report = run_suite(t.field, t)
    failed = [(c.module, c.name, c.detail) for c in report.checks if not c.passed]
    assert report.passed, failed
    d = report.to_dict()
    assert d["n_checks"] == len(report.checks) and d["n_failed"] == 0
    json.dumps(d)


def test_runner_records_exceptions():
    r = _Runner()
    r.run("m", "ok", lambda: (True, {"x": 1}))
    r.run("m", "boom", lambda: 1 / 0)
    rep = VerifyReport("rational", 10, r.checks)
    assert not rep.passed
    assert "ZeroDivisionError" in r.checks[1].detail["exception"]
