"""Binary cache files for precomputed collision-kernel mode tables.

Layout (all little-endian):

    magic   4 bytes  b"FBKM"
    version u32
    rep     u8       0 = classical, 1 = carleman
    d       u32
    n_v     u32
    gamma   f64
    C       f64
    R       f64
    T_dom   f64

followed by representation-specific metadata and raw complex128 arrays:

    classical:  n_vals u64; sq_vals int64[n_vals]; V complex128[n_vals^2]
    carleman:   M1 u32; M2 u32; weighting u8; P u64;
                theta f64[P]; phi f64[P]; weights complex128[P];
                alpha complex128[P*n_v^d]; alpha_prime complex128[P*n_v^d];
                diag complex128[n_v^d]

A file whose header does not match the requested parameters is refused.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"FBKM"
VERSION = 1

REP_CLASSICAL = 0
REP_CARLEMAN = 1

_WEIGHTING_CODES = {"uniform": 0, "sphere": 1, "gauss": 2}
_WEIGHTING_NAMES = {v: k for k, v in _WEIGHTING_CODES.items()}

_HEADER = struct.Struct("<4sIBIIdddd")


class CacheMismatchError(RuntimeError):
    """Cache file header disagrees with the requested table parameters."""


@dataclass(frozen=True)
class CacheHeader:
    representation: int
    d: int
    n_v: int
    gamma: float
    C: float
    R: float
    T_dom: float

    def pack(self) -> bytes:
        return _HEADER.pack(MAGIC, VERSION, self.representation, self.d,
                            self.n_v, self.gamma, self.C, self.R, self.T_dom)


def _read_header(fh) -> CacheHeader:
    raw = fh.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise CacheMismatchError("cache file truncated before header end")
    magic, version, rep, d, n_v, gamma, C, R, T_dom = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise CacheMismatchError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CacheMismatchError(f"unsupported cache version {version}")
    return CacheHeader(rep, d, n_v, gamma, C, R, T_dom)


def _check(expected: CacheHeader, found: CacheHeader):
    if expected != found:
        raise CacheMismatchError(
            f"cache header mismatch: expected {expected}, found {found}"
        )


def _read_array(fh, dtype, count) -> np.ndarray:
    arr = np.fromfile(fh, dtype=dtype, count=count)
    if arr.size != count:
        raise CacheMismatchError("cache file truncated inside array data")
    return arr


def classical_cache_name(header: CacheHeader) -> str:
    key = header.pack()
    return f"classical_d{header.d}_n{header.n_v}_{hashlib.sha1(key).hexdigest()[:12]}.fbkm"


def carleman_cache_name(header: CacheHeader, M1: int, M2: int, weighting: str) -> str:
    key = header.pack() + struct.pack("<IIB", M1, M2, _WEIGHTING_CODES[weighting])
    return f"carleman_d{header.d}_n{header.n_v}_M{M1}x{M2}_{hashlib.sha1(key).hexdigest()[:12]}.fbkm"


def save_classical(path, header: CacheHeader, sq_vals: np.ndarray, V: np.ndarray):
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(header.pack())
        fh.write(struct.pack("<Q", sq_vals.size))
        sq_vals.astype("<i8").tofile(fh)
        V.astype("<c16").reshape(-1).tofile(fh)


def load_classical(path, expected: CacheHeader):
    path = Path(path)
    with open(path, "rb") as fh:
        found = _read_header(fh)
        _check(expected, found)
        (n_vals,) = struct.unpack("<Q", fh.read(8))
        sq_vals = _read_array(fh, "<i8", n_vals)
        V = _read_array(fh, "<c16", n_vals * n_vals).reshape(n_vals, n_vals)
    return sq_vals, V


def save_carleman(path, header: CacheHeader, M1: int, M2: int, weighting: str,
                  theta, phi, weights, alpha, alpha_prime, diag):
    path = Path(path)
    P = weights.size
    with open(path, "wb") as fh:
        fh.write(header.pack())
        fh.write(struct.pack("<IIBQ", M1, M2, _WEIGHTING_CODES[weighting], P))
        theta.astype("<f8").tofile(fh)
        phi.astype("<f8").tofile(fh)
        weights.astype("<c16").tofile(fh)
        alpha.astype("<c16").reshape(-1).tofile(fh)
        alpha_prime.astype("<c16").reshape(-1).tofile(fh)
        diag.astype("<c16").reshape(-1).tofile(fh)


def load_carleman(path, expected: CacheHeader, M1: int, M2: int, weighting: str):
    path = Path(path)
    with open(path, "rb") as fh:
        found = _read_header(fh)
        _check(expected, found)
        m1, m2, wcode, P = struct.unpack("<IIBQ", fh.read(17))
        if (m1, m2) != (M1, M2) or _WEIGHTING_NAMES.get(wcode) != weighting:
            raise CacheMismatchError(
                f"angle-set mismatch: file has M=({m1},{m2}) "
                f"weighting={_WEIGHTING_NAMES.get(wcode)!r}, "
                f"requested M=({M1},{M2}) weighting={weighting!r}"
            )
        n_modes = expected.n_v ** expected.d
        shape = (expected.n_v,) * expected.d
        theta = _read_array(fh, "<f8", P)
        phi = _read_array(fh, "<f8", P)
        weights = _read_array(fh, "<c16", P)
        alpha = _read_array(fh, "<c16", P * n_modes).reshape((P,) + shape)
        alpha_prime = _read_array(fh, "<c16", P * n_modes).reshape((P,) + shape)
        diag = _read_array(fh, "<c16", n_modes).reshape(shape)
    return theta, phi, weights, alpha, alpha_prime, diag
