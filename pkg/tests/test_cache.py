import struct
import zlib

import numpy as np
import pytest

from dzlab import cache
from dzlab.errors import CacheError, CacheVersionError
from dzlab.fields import parse_field_spec
from dzlab.sieve import CoeffTable, SieveTables, TableKind, build_tables

from conftest import tables_for


def _same(a: SieveTables, b: SieveTables):
    assert a.field == b.field and a.X == b.X
    for kind in TableKind:
        x, y = a.table(kind).values, b.table(kind).values
        assert x.dtype == y.dtype
        assert [int(v) for v in x] == [int(v) for v in y]


@pytest.mark.parametrize("spec", ["rational", "quad:-1", "poly:1,0,0,-2"])
def test_round_trip_bit_exact(spec, cache_env):
    t = tables_for(spec, 10**4)
    data = cache.dumps(t)
    assert data[:4] == b"DZSV"
    _same(cache.loads(data), t)
    assert cache.dumps(cache.loads(data)) == data
    path = cache.save(t)
    assert path.parent == cache_env and path.exists()
    _same(cache.load(path), t)


def test_wide_values_round_trip():
    t = tables_for("quad:-1", 100)
    big = np.array([0] + [(-1) ** m * (2**100 + m) for m in range(1, 101)], dtype=object)
    wide = SieveTables(t.field, 100, t.ideal_count, CoeffTable(t.field, 100, TableKind.TOTIENT_SUM, big),
                       t.moebius_sum)
    back = cache.loads(cache.dumps(wide))
    assert back.totient_sum.values.dtype == object
    assert list(back.totient_sum.values) == list(big)


def test_layout(cache_env):
    t = tables_for("quad:-1", 50)
    data = cache.dumps(t)
    version, slen = struct.unpack_from("<HH", data, 4)
    assert version == cache.VERSION and data[8 : 8 + slen] == b"quad:-1"
    (X,) = struct.unpack_from("<Q", data, 8 + slen)
    assert X == 50
    assert len(data) == 8 + slen + 8 + 3 * (2 + 51 * 8) + 4
    assert struct.unpack("<I", data[-4:])[0] == zlib.crc32(data[:-4])


def test_corruption_detected():
    data = bytearray(cache.dumps(tables_for("quad:-1", 100)))
    data[40] ^= 0x01
    with pytest.raises(CacheError, match="CRC"):
        cache.loads(bytes(data))
    with pytest.raises(CacheError):
        cache.loads(b"NOPE" + bytes(data[4:]))
    with pytest.raises(CacheError):
        cache.loads(b"DZ")


def test_version_mismatch_refused():
    data = bytearray(cache.dumps(tables_for("quad:-1", 100)))
    struct.pack_into("<H", data, 4, cache.VERSION + 1)
    body = bytes(data[:-4])
    data = body + struct.pack("<I", zlib.crc32(body))
    with pytest.raises(CacheVersionError, match="rebuild"):
        cache.loads(data)


def test_load_or_build(cache_env):
    calls = []

    def builder(fld, X):
        calls.append(X)
        return build_tables(fld, X)

    a, hit = cache.load_or_build("quad:5", 500, builder=builder)
    assert not hit and calls == [500]
    b, hit = cache.load_or_build(parse_field_spec("quad:5"), 500, builder=builder)
    assert hit and calls == [500]
    _same(a, b)
    c, hit = cache.load_or_build("quad:5", 500, use_cache=False, builder=builder)
    assert not hit and calls == [500, 500]


def test_cache_dir_env(cache_env, monkeypatch):
    assert cache.cache_dir() == cache_env
    assert cache.cache_path("quad:-1", 10).parent == cache_env
    assert cache.cache_path("quad:-1", 10) != cache.cache_path("quad:5", 10)
    monkeypatch.delenv("DZLAB_CACHE_DIR")
    assert cache.cache_dir().name == "dzlab"
