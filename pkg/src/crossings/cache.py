"""Binary cache files for the expensive pipeline stages.

Three formats, all little-endian with a 4-byte magic, a format version and
the cycle length in the header, and fixed-width records sorted by packed key
so readers can binary-search without an index:

  q_<m>.bin        QTBL  distances from the base cycle, one record per cycle
  orbits_<m>.bin   ORBT  pair-orbit representatives with orbit size and cost
  coeffs_<m>_beta.bin  COEF  per-orbit coefficient blocks for the small relaxation

Every file carries a sidecar <name>.crc32 holding the ASCII hex CRC-32 of the
full binary payload; readers verify it before parsing and raise DataError on
any mismatch, truncation, or header disagreement.
"""

from __future__ import annotations

import os
import struct
import zlib
from math import factorial
from pathlib import Path

import numpy as np

from .errors import DataError

_VERSION = 1


def default_cache_dir() -> Path:
    env = os.environ.get("CROSSING_CACHE_DIR")
    if env:
        return Path(env).expanduser()
    return Path("~/.cache/crossings").expanduser()


def resolve_cache_dir(explicit: str | os.PathLike | None = None) -> Path:
    d = Path(explicit).expanduser() if explicit is not None else default_cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    return d


def q_table_path(cache_dir: Path, m: int) -> Path:
    return Path(cache_dir) / f"q_{m}.bin"


def orbits_path(cache_dir: Path, m: int) -> Path:
    return Path(cache_dir) / f"orbits_{m}.bin"


def coeffs_beta_path(cache_dir: Path, m: int) -> Path:
    return Path(cache_dir) / f"coeffs_{m}_beta.bin"


def coeffs_alpha_path(cache_dir: Path, m: int) -> Path:
    return Path(cache_dir) / f"coeffs_{m}_alpha.bin"


def _crc_path(path: Path) -> Path:
    return path.with_name(path.name + ".crc32")


def _write_payload(path: Path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)
    _crc_path(path).write_text(f"{zlib.crc32(payload) & 0xFFFFFFFF:08x}\n")


def _read_payload(path: Path) -> bytes:
    path = Path(path)
    if not path.exists():
        raise DataError(f"cache file missing: {path}")
    payload = path.read_bytes()
    crc_file = _crc_path(path)
    if not crc_file.exists():
        raise DataError(f"checksum sidecar missing: {crc_file}")
    try:
        stored = int(crc_file.read_text().strip(), 16)
    except ValueError as exc:
        raise DataError(f"unreadable checksum sidecar: {crc_file}") from exc
    if stored != (zlib.crc32(payload) & 0xFFFFFFFF):
        raise DataError(f"checksum mismatch for {path}")
    return payload


def _check_header(path: Path, got: tuple, want: tuple) -> None:
    names = ("magic", "version", "m", "extra")
    for name, g, w in zip(names, got, want):
        if g != w:
            raise DataError(f"{path}: bad {name} (got {g!r}, want {w!r})")


# -- QTBL ------------------------------------------------------------------

_Q_HEADER = struct.Struct("<4sBBI")


def _q_dtype(m: int) -> np.dtype:
    return np.dtype([("seq", np.uint8, (m,)), ("dist", "<u2")])


def write_q_table(path: Path, m: int, dist: np.ndarray, seqs: np.ndarray) -> None:
    """Records are (word, distance) and must already be in packed-key order."""
    n = len(dist)
    rec = np.empty(n, dtype=_q_dtype(m))
    rec["seq"] = seqs
    rec["dist"] = dist
    payload = _Q_HEADER.pack(b"QTBL", _VERSION, m, n) + rec.tobytes()
    _write_payload(path, payload)


def read_q_table(path: Path, m: int) -> np.ndarray:
    """Distances indexed by cycle id (records are stored in id order)."""
    payload = _read_payload(path)
    magic, ver, got_m, n = _Q_HEADER.unpack_from(payload)
    _check_header(path, (magic, ver, got_m), (b"QTBL", _VERSION, m))
    if n != factorial(m - 1):
        raise DataError(f"{path}: expected {factorial(m - 1)} records, header says {n}")
    body = payload[_Q_HEADER.size :]
    rec = np.frombuffer(body, dtype=_q_dtype(m))
    if rec.shape[0] != n:
        raise DataError(f"{path}: truncated body")
    return rec["dist"].copy()


# -- ORBT ------------------------------------------------------------------

_ORBT_HEADER = struct.Struct("<4sBBQ")


def _orbt_dtype(m: int) -> np.dtype:
    return np.dtype([("rep", np.uint8, (m,)), ("size", "<u8"), ("q", "<u2")])


def write_orbits(path: Path, m: int, rep_seqs: np.ndarray, sizes: np.ndarray, qs: np.ndarray) -> None:
    """One record per pair orbit, sorted by the packed key of the second
    component's representative; the record index is the orbit's stable id."""
    n = len(sizes)
    rec = np.empty(n, dtype=_orbt_dtype(m))
    rec["rep"] = rep_seqs
    rec["size"] = sizes
    rec["q"] = qs
    payload = _ORBT_HEADER.pack(b"ORBT", _VERSION, m, n) + rec.tobytes()
    _write_payload(path, payload)


def read_orbits(path: Path, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    payload = _read_payload(path)
    magic, ver, got_m, n = _ORBT_HEADER.unpack_from(payload)
    _check_header(path, (magic, ver, got_m), (b"ORBT", _VERSION, m))
    rec = np.frombuffer(payload[_ORBT_HEADER.size :], dtype=_orbt_dtype(m))
    if rec.shape[0] != n:
        raise DataError(f"{path}: truncated body")
    return rec["rep"].copy(), rec["size"].copy(), rec["q"].copy()


# -- COEF ------------------------------------------------------------------

_COEF_HEADER = struct.Struct("<4sBBBQ")


def _coef_dtype(d: int) -> np.dtype:
    t = d * (d + 1) // 2
    return np.dtype([("orbit", "<u8"), ("size", "<u8"), ("q", "<u2"), ("tri", "<i8", (t,))])


def write_coeffs_beta(
    path: Path,
    m: int,
    d: int,
    orbit_ids: np.ndarray,
    sizes: np.ndarray,
    qs: np.ndarray,
    tri: np.ndarray,
) -> None:
    """tri holds each orbit's d x d symmetric block as its upper triangle,
    row-major; entries are exact integers."""
    n = len(orbit_ids)
    rec = np.empty(n, dtype=_coef_dtype(d))
    rec["orbit"] = orbit_ids
    rec["size"] = sizes
    rec["q"] = qs
    rec["tri"] = tri
    payload = _COEF_HEADER.pack(b"COEF", _VERSION, m, d, n) + rec.tobytes()
    _write_payload(path, payload)


def read_coeffs_beta(path: Path, m: int) -> tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    payload = _read_payload(path)
    magic, ver, got_m, d, n = _COEF_HEADER.unpack_from(payload)
    _check_header(path, (magic, ver, got_m), (b"COEF", _VERSION, m))
    rec = np.frombuffer(payload[_COEF_HEADER.size :], dtype=_coef_dtype(d))
    if rec.shape[0] != n:
        raise DataError(f"{path}: truncated body")
    return d, rec["orbit"].copy(), rec["size"].copy(), rec["q"].copy(), rec["tri"].copy()


# -- COFA ------------------------------------------------------------------

_COFA_HEADER = struct.Struct("<4sBBBQ")


def _cofa_dtype(dims: tuple[int, ...]) -> np.dtype:
    t = sum(d * (d + 1) // 2 for d in dims)
    return np.dtype([("orbit", "<u8"), ("size", "<u8"), ("q", "<u2"), ("tri", "<i8", (t,))])


def write_coeffs_alpha(
    path: Path,
    m: int,
    dims: tuple[int, ...],
    orbit_ids: np.ndarray,
    sizes: np.ndarray,
    qs: np.ndarray,
    tri: np.ndarray,
) -> None:
    """Like the single-block format but with one upper triangle per block
    concatenated in block order; dims is stored so readers can split."""
    n = len(orbit_ids)
    rec = np.empty(n, dtype=_cofa_dtype(dims))
    rec["orbit"] = orbit_ids
    rec["size"] = sizes
    rec["q"] = qs
    rec["tri"] = tri
    payload = (
        _COFA_HEADER.pack(b"COFA", _VERSION, m, len(dims), n)
        + bytes(dims)
        + rec.tobytes()
    )
    _write_payload(path, payload)


def read_coeffs_alpha(
    path: Path, m: int
) -> tuple[tuple[int, ...], np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    payload = _read_payload(path)
    magic, ver, got_m, nblocks, n = _COFA_HEADER.unpack_from(payload)
    _check_header(path, (magic, ver, got_m), (b"COFA", _VERSION, m))
    off = _COFA_HEADER.size
    dims = tuple(payload[off : off + nblocks])
    rec = np.frombuffer(payload[off + nblocks :], dtype=_cofa_dtype(dims))
    if rec.shape[0] != n:
        raise DataError(f"{path}: truncated body")
    return dims, rec["orbit"].copy(), rec["size"].copy(), rec["q"].copy(), rec["tri"].copy()
