"""QLS1 result container: single file, text header, raw array payloads.

Layout:
  bytes 0..3    magic "QLS1"
  bytes 4..11   little-endian uint64 header length L
  bytes 12..12+L  UTF-8 JSON header:
      {"arrays": [{"name", "dtype" ("f64"|"c128"), "shape", "offset"}, ...],
       "config": {...}, "diagnostics": [...]}
  remainder     little-endian raw array payloads at the stated offsets
                (relative to the end of the header)

The header alone suffices to extract every array; round trips are
bitwise stable.
"""

import json
import struct

import numpy as np

from .errors import ComparisonError, ContainerError

MAGIC = b"QLS1"

_DTYPES = {"f64": np.dtype("<f8"), "c128": np.dtype("<c16")}
_NAMES = {np.dtype("float64"): "f64", np.dtype("complex128"): "c128"}


def write_container(path, arrays, config=None, diagnostics=None):
    """Write named arrays plus the config echo and diagnostics log."""
    entries = []
    payload = bytearray()
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        if arr.dtype not in _NAMES:
            arr = arr.astype(complex if np.iscomplexobj(arr) else float)
        dtype_name = _NAMES[arr.dtype]
        entries.append({"name": name, "dtype": dtype_name,
                        "shape": list(arr.shape), "offset": len(payload)})
        payload += arr.astype(_DTYPES[dtype_name]).tobytes()
    header = {"arrays": entries, "config": config or {},
              "diagnostics": list(diagnostics or [])}
    header_bytes = json.dumps(header, sort_keys=True,
                              separators=(",", ":")).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<Q", len(header_bytes)))
            fh.write(header_bytes)
            fh.write(bytes(payload))
    except OSError as exc:
        raise ContainerError(f"cannot write container '{path}': {exc}") from exc


def read_container(path):
    """Read a container; returns (arrays, config, diagnostics)."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ContainerError(f"cannot read container '{path}': {exc}") from exc
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise ContainerError(f"'{path}' is not a QLS1 container")
    (header_len,) = struct.unpack("<Q", blob[4:12])
    if len(blob) < 12 + header_len:
        raise ContainerError(f"'{path}' is truncated (header)")
    try:
        header = json.loads(blob[12:12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"bad container header in '{path}': {exc}") from exc
    payload = blob[12 + header_len:]
    arrays = {}
    for entry in header.get("arrays", []):
        try:
            dtype = _DTYPES[entry["dtype"]]
            shape = tuple(entry["shape"])
            offset = entry["offset"]
            name = entry["name"]
        except (KeyError, TypeError) as exc:
            raise ContainerError(f"malformed array entry in '{path}': {exc}") from exc
        nbytes = dtype.itemsize * int(np.prod(shape, dtype=np.int64))
        if offset < 0 or offset + nbytes > len(payload):
            raise ContainerError(
                f"array '{name}' in '{path}' extends past the payload")
        arrays[name] = np.frombuffer(
            payload[offset:offset + nbytes], dtype=dtype).reshape(shape).copy()
    return arrays, header.get("config", {}), header.get("diagnostics", [])


def compare_arrays(a, b, metric="l1"):
    """Normalized L1 or max-abs distance between two arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ComparisonError(f"shape mismatch: {a.shape} vs {b.shape}")
    if metric == "l1":
        denom = max(np.sum(np.abs(a)), np.sum(np.abs(b)))
        if denom == 0:
            return 0.0
        return float(np.sum(np.abs(a - b)) / denom)
    if metric == "linf":
        return float(np.max(np.abs(a - b))) if a.size else 0.0
    raise ComparisonError(f"unknown metric '{metric}'")
