import argparse
import json
import subprocess
import sys

import pytest

from dzlab import cache
from dzlab.cli import (EXIT_CAPABILITY, EXIT_CONFIG, EXIT_OK, ExperimentConfig, main, parse_complex,
                       parse_int, parse_q_range)
from dzlab.errors import ConfigError


@pytest.fixture()
def out(tmp_path, cache_env):
    return tmp_path / "out"


def run(*argv):
    return main([str(a) for a in argv])


def test_parsers():
    assert parse_int("1e6") == parse_int("10**6") == parse_int("1000000") == 10**6
    with pytest.raises(argparse.ArgumentTypeError):
        parse_int("1.5")
    assert parse_complex("1.25+1i") == 1.25 + 1j
    assert parse_complex("2") == 2
    assert parse_q_range("1e-1:1e-5:48") == parse_q_range("1e-5:1e-1:48") == (1e-1, 1e-5, 48)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_q_range("1e-1:1e-5")


def test_config_validation():
    cfg = ExperimentConfig("quad:-1", X=100, q_decades=(1e-1, 1e-5, 48), functions=["indicator:1,2"])
    assert cfg.required_X() == 632
    with pytest.raises(ConfigError, match="required X >= 632"):
        cfg.validate()
    ExperimentConfig("quad:-1", X=1000, q_decades=(1e-1, 1e-5, 48), functions=["indicator:1,2"]).validate()


def test_measure_csv(out, capsys):
    assert run("measure", "--field", "quad:-1", "--X", 10**4, "--f", "indicator:1,2",
               "--q", "1e-1:1e-5:48", "--out", out) == EXIT_OK
    csv = out / "measure_quad_m1_indicator_1_2.csv"
    lines = csv.read_text().splitlines()
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "q,m_q,m_limit,error,error_over_sqrt_q"
    assert len(body) - 1 == 193
    assert any(l.startswith("# kappa:") for l in lines)
    assert any(l.startswith("# version:") for l in lines)
    fit = json.loads((out / "exponent_fit_quad_m1.json").read_text())
    assert 0.2 <= fit["fits"]["indicator:1,2"]["alpha_hat"] <= 0.55
    assert len((out / "measure_quad_m1_indicator_1_2.dat").read_text().splitlines()) == 193
    assert "required X = 632" in capsys.readouterr().err


def test_determinism(tmp_path, cache_env):
    for d in ("a", "b"):
        assert run("mertens", "--field", "quad:5", "--X", 10**4, "--out", tmp_path / d) == EXIT_OK
        assert run("scan", "--field", "quad:5", "--X", 10**4, "--f", "polybump:2",
                   "--q", "1e-1:1e-4:8", "--out", tmp_path / d) == EXIT_OK
    for name in ("mertens_quad_5.csv", "scan_quad_5_polybump_2.csv"):
        a = (tmp_path / "a" / name).read_text().splitlines()
        b = (tmp_path / "b" / name).read_text().splitlines()
        diff = [(x, y) for x, y in zip(a, b) if x != y]
        assert len(a) == len(b)
        assert all(x.startswith("# generated:") for x, _ in diff)


def test_exit_codes(out):
    assert run("field", "--field", "quad:12", "--out", out) == EXIT_CONFIG
    assert run("measure", "--field", "quad:-1", "--X", 100, "--f", "indicator:1,2", "--out", out) == EXIT_CONFIG
    assert run("sieve", "--field", "poly:1,0,3", "--X", 1000, "--out", out) == EXIT_CAPABILITY
    assert run("field", "--field", "poly:1,0,0,0,1", "--out", out) == EXIT_CONFIG
    assert run("zeta", "--field", "quad:-1", "--X", 100, "--s", "1.0", "--out", out) == EXIT_CONFIG
    with pytest.raises(SystemExit) as info:
        run("measure", "--field", "quad:-1")
    assert info.value.code == 2


def test_sieve_writes_cache(out, cache_env, capsys):
    assert run("sieve", "--field", "poly:1,0,0,-2", "--X", 10**4, "--out", out) == EXIT_OK
    text = capsys.readouterr().out
    assert "kappa regression estimate" in text
    path = cache.cache_path("poly:1,0,0,-2", 10**4)
    assert path.exists()
    # a second run reads it back
    assert run("field", "--field", "poly:1,0,0,-2", "--X", 10**4, "--out", out) == EXIT_OK
    assert "from cache" in capsys.readouterr().err
    # a stale version is refused with a hint
    data = bytearray(path.read_bytes())
    data[4] ^= 0xFF
    path.write_bytes(bytes(data))
    assert run("field", "--field", "poly:1,0,0,-2", "--X", 10**4, "--out", out) == EXIT_CONFIG


def test_zeta_and_field_json(out, capsys):
    assert run("zeta", "--field", "quad:-1", "--X", 100, "--s", "2", "0.5+3i", "--out", out) == EXIT_OK
    obj = json.loads((out / "zeta_quad_m1.json").read_text())
    assert obj["kappa_method"] == "ExactCharacterSeries"
    assert abs(obj["values"][0]["value"]["re"] - 1.5067030099229851) < 1e-12
    capsys.readouterr()
    assert run("field", "--field", "quad:5", "--X", 100, "--out", out) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["discriminant"] == 5


def test_mellin_command(out):
    assert run("mellin", "--field", "quad:-1", "--X", 10**5, "--f", "polybump:2",
               "--s", "2", "0.8+1i", "--out", out) == EXIT_OK
    obj = json.loads((out / "mellin_identity_quad_m1.json").read_text())
    assert len(obj["checks"]) == 1 and obj["checks"][0]["passed"]
    rows = [l for l in (out / "mellin_quad_m1.csv").read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "f,s_re,s_im,value_re,value_im,method,err_est"
    assert len(rows) == 4


def test_verify_command(out):
    code = subprocess.run([sys.executable, "-m", "dzlab", "verify", "--field", "quad:-1", "--X", "100000",
                           "--out", str(out), "--no-cache"], capture_output=True, text=True)
    assert code.returncode == EXIT_OK, code.stdout + code.stderr
    report = json.loads((out / "verify_quad_m1.json").read_text())
    assert report["passed"] and report["n_failed"] == 0
    modules = {c["module"] for c in report["checks"]}
    assert {"field_core", "prime_splitter", "dirichlet_sieve", "zeta_engine", "measure_lab",
            "mellin_engine", "cli_report"} <= modules
