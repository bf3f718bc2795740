"""Binary sieve cache.

Layout (little-endian):
    b"DZSV" | version u16 | spec length u16 | spec utf-8 | X u64
    then per table: kind u8 | width u8 (8 or 16) | (X + 1) signed integers
    | CRC32 u32 of everything before it.
A 16-byte integer is stored as its low 8 bytes (unsigned) then high 8 bytes (signed).
"""

from __future__ import annotations

import hashlib
import os
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import CacheError, CacheVersionError
from .fields import parse_field_spec
from .sieve import CoeffTable, SieveTables, TableKind

MAGIC = b"DZSV"
VERSION = 1
_KINDS = [TableKind.IDEAL_COUNT, TableKind.TOTIENT_SUM, TableKind.MOEBIUS_SUM]


def cache_dir() -> Path:
    env = os.environ.get("DZLAB_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "dzlab"


def cache_path(spec: str, X: int, directory: Path | None = None) -> Path:
    tag = hashlib.sha1(spec.encode()).hexdigest()[:12]
    return (directory or cache_dir()) / f"sieve-{tag}-{X}.dzsv"


def _encode(values: np.ndarray) -> tuple[int, bytes]:
    if values.dtype != object:
        return 8, values.astype("<i8").tobytes()
    lo = np.array([int(v) & 0xFFFFFFFFFFFFFFFF for v in values], dtype="<u8")
    hi = np.array([int(v) >> 64 for v in values], dtype="<i8")
    out = np.empty(2 * len(values), dtype="<u8")
    out[0::2] = lo
    out[1::2] = hi.view("<u8")
    return 16, out.tobytes()


def _decode(width: int, raw: bytes, count: int) -> np.ndarray:
    if width == 8:
        return np.frombuffer(raw, dtype="<i8", count=count).astype(np.int64)
    words = np.frombuffer(raw, dtype="<u8", count=2 * count)
    lo, hi = words[0::2], words[1::2].view("<i8")
    return np.array([(int(h) << 64) | int(l) for l, h in zip(lo, hi)], dtype=object)


def dumps(tables: SieveTables) -> bytes:
    spec = tables.field.spec.encode()
    parts = [MAGIC, struct.pack("<HH", VERSION, len(spec)), spec, struct.pack("<Q", tables.X)]
    for i, kind in enumerate(_KINDS):
        width, raw = _encode(tables.table(kind).values)
        parts.append(struct.pack("<BB", i, width))
        parts.append(raw)
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def loads(data: bytes) -> SieveTables:
    if len(data) < 4 + 4 + 8 + 4 or data[:4] != MAGIC:
        raise CacheError("not a sieve cache file")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise CacheError("CRC32 mismatch; cache file is corrupt")
    version, slen = struct.unpack_from("<HH", body, 4)
    if version != VERSION:
        raise CacheVersionError(f"cache version {version}, expected {VERSION}; re-run `dzlab sieve` to rebuild")
    pos = 8
    spec = body[pos : pos + slen].decode()
    pos += slen
    (X,) = struct.unpack_from("<Q", body, pos)
    pos += 8
    field = parse_field_spec(spec)
    tables = {}
    for _ in _KINDS:
        idx, width = struct.unpack_from("<BB", body, pos)
        pos += 2
        if width not in (8, 16) or idx >= len(_KINDS):
            raise CacheError(f"bad table header (kind {idx}, width {width})")
        n = (X + 1) * width
        tables[_KINDS[idx]] = CoeffTable(field, X, _KINDS[idx], _decode(width, body[pos : pos + n], X + 1))
        pos += n
    if pos != len(body):
        raise CacheError("trailing bytes in cache file")
    return SieveTables(field, X, tables[TableKind.IDEAL_COUNT], tables[TableKind.TOTIENT_SUM],
                       tables[TableKind.MOEBIUS_SUM])


def save(tables: SieveTables, path: Path | None = None) -> Path:
    path = Path(path) if path else cache_path(tables.field.spec, tables.X)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(dumps(tables))
    tmp.replace(path)
    return path


def load(path: Path) -> SieveTables:
    return loads(Path(path).read_bytes())


def load_or_build(spec_or_field, X: int, use_cache: bool = True, builder=None) -> tuple[SieveTables, bool]:
    """(tables, came_from_cache)."""
    from .sieve import build_tables

    field = parse_field_spec(spec_or_field) if isinstance(spec_or_field, str) else spec_or_field
    path = cache_path(field.spec, X)
    if use_cache and path.exists():
        return load(path), True
    tables = (builder or build_tables)(field, X)
    if use_cache:
        save(tables, path)
    return tables, False
