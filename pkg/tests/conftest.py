from functools import lru_cache

import pytest

from dzlab.fields import parse_field_spec
from dzlab.sieve import build_tables
from dzlab.zeta import compute_invariants


@lru_cache(maxsize=None)
def tables_for(spec: str, X: int):
    return build_tables(parse_field_spec(spec), X)


@lru_cache(maxsize=None)
def invariants_for(spec: str, X: int = 10**6):
    fld = parse_field_spec(spec)
    if fld.kind.value == "monogenic":
        return compute_invariants(fld, tables_for(spec, X).ideal_count)
    return compute_invariants(fld)


@pytest.fixture(scope="session")
def gaussian():
    return parse_field_spec("quad:-1")


@pytest.fixture(scope="session")
def golden():
    return parse_field_spec("quad:5")


@pytest.fixture(scope="session")
def cubic():
    return parse_field_spec("poly:1,0,0,-2")


@pytest.fixture(scope="session")
def rationals():
    return parse_field_spec("rational")


@pytest.fixture()
def cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DZLAB_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"
