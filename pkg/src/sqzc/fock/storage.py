"""Binary persistence of density matrices.

Layout (all integers little-endian)::

    4 bytes   magic b"SQZC"
    u32       format version (1)
    u32       byte length of the JSON header
    ...       UTF-8 JSON header: dims, config, params, dtype, order
    ...       d*d complex128 entries, little-endian, row-major
"""
import json
import struct

import numpy as np

from ..effective import CircuitParams
from .operators import HilbertConfig
from .states import DensityMatrix

__all__ = ["MAGIC", "FORMAT_VERSION", "save_state", "load_state", "StorageError"]

MAGIC = b"SQZC"
FORMAT_VERSION = 1
_DTYPE = "<c16"


class StorageError(ValueError):
    pass


def save_state(path, rho, params=None):
    """Write ``rho`` (and optionally its :class:`CircuitParams`) to ``path``."""
    header = {
        "dims": list(rho.dims),
        "config": rho.config.to_dict() if rho.config is not None else None,
        "params": params.to_dict() if params is not None else None,
        "dtype": "complex128-le",
        "order": "row-major",
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    data = np.ascontiguousarray(rho.matrix, dtype=_DTYPE).tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(data)


def load_state(path):
    """Read a state written by :func:`save_state`; returns ``(rho, params)``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise StorageError(f"{path}: not a state file (bad magic)")
    if len(raw) < 12:
        raise StorageError(f"{path}: truncated header")
    version, hlen = struct.unpack("<II", raw[4:12])
    if version != FORMAT_VERSION:
        raise StorageError(f"{path}: unsupported format version {version}")
    try:
        header = json.loads(raw[12:12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StorageError(f"{path}: corrupt header ({exc})") from None
    dims = tuple(header["dims"])
    d = int(np.prod(dims))
    body = raw[12 + hlen:]
    if len(body) != 16 * d * d:
        raise StorageError(f"{path}: expected {16 * d * d} data bytes, found {len(body)}")
    matrix = np.frombuffer(body, dtype=_DTYPE).reshape(d, d).astype(complex)
    config = HilbertConfig(**header["config"]) if header.get("config") else None
    params = CircuitParams(**header["params"]) if header.get("params") else None
    return DensityMatrix(matrix, dims, config), params
