"""Tensor serialization: a small binary/text container plus CSV slice import.

Layout (both formats): header carrying ``n, m, p`` and the scalar kind
(real float64 or complex128), optional JSON metadata, then the entries in
slice-major order with each frontal slice stored column-major.  Real
storage is used when the imaginary residue is negligible so that real
problems round-trip compactly.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .core import REAL_RESTORE_TOL, Tensor3
from .problems import ProblemInstance

__all__ = [
    "write_tensor",
    "read_tensor",
    "read_frontal_slice_csv",
    "tensor_from_slice_csvs",
    "save_problem",
    "load_problem",
]

_MAGIC = b"TNS3"
_VERSION = 1
_KIND_REAL = 0
_KIND_COMPLEX = 1


def _entries(A: Tensor3) -> np.ndarray:
    # slice-major, column-major within each slice
    return A.data.transpose(2, 1, 0).reshape(-1)


def _tensor_from_entries(flat: np.ndarray, n: int, m: int, p: int) -> Tensor3:
    return Tensor3(flat.reshape(p, m, n).transpose(2, 1, 0))


def _storage_kind(A: Tensor3) -> int:
    scale = 1.0 + (np.abs(A.data).max() if A.data.size else 0.0)
    if np.abs(A.data.imag).max(initial=0.0) <= REAL_RESTORE_TOL * scale:
        return _KIND_REAL
    return _KIND_COMPLEX


def write_tensor(path, A: Tensor3, fmt: str = "binary", metadata: dict | None = None):
    """Write ``A`` to ``path`` in ``binary`` or ``text`` format."""
    if fmt == "binary":
        _write_binary(path, A, metadata)
    elif fmt == "text":
        _write_text(path, A, metadata)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_tensor(path) -> tuple[Tensor3, dict]:
    """Read a tensor and its metadata; auto-detects the format."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == _MAGIC:
        return _read_binary(path)
    return _read_text(path)


def _write_binary(path, A: Tensor3, metadata):
    kind = _storage_kind(A)
    meta = json.dumps(metadata or {}).encode("utf-8")
    flat = _entries(A)
    payload = flat.real.astype("<f8") if kind == _KIND_REAL else flat.astype("<c16")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<BBH", _VERSION, kind, 0))
        fh.write(struct.pack("<III", A.n, A.m, A.p))
        fh.write(struct.pack("<I", len(meta)))
        fh.write(meta)
        fh.write(payload.tobytes())


def _read_binary(path) -> tuple[Tensor3, dict]:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a tensor container")
        version, kind, _ = struct.unpack("<BBH", fh.read(4))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported container version {version}")
        n, m, p = struct.unpack("<III", fh.read(12))
        (meta_len,) = struct.unpack("<I", fh.read(4))
        meta = json.loads(fh.read(meta_len).decode("utf-8")) if meta_len else {}
        count = n * m * p
        if kind == _KIND_REAL:
            width, dtype = 8, "<f8"
        elif kind == _KIND_COMPLEX:
            width, dtype = 16, "<c16"
        else:
            raise ValueError(f"{path}: unknown scalar kind {kind}")
        payload = fh.read()
        if len(payload) < width * count:
            raise ValueError(f"{path}: truncated payload")
        flat = np.frombuffer(payload[: width * count], dtype=dtype).astype(np.complex128)
    return _tensor_from_entries(flat, n, m, p), meta


def _write_text(path, A: Tensor3, metadata):
    kind = _storage_kind(A)
    kind_name = "real" if kind == _KIND_REAL else "complex"
    flat = _entries(A)
    with open(path, "w") as fh:
        fh.write(f"tensor3 v{_VERSION} {A.n} {A.m} {A.p} {kind_name}\n")
        fh.write("meta " + json.dumps(metadata or {}) + "\n")
        if kind == _KIND_REAL:
            for x in flat:
                fh.write(f"{float(x.real)!r}\n")
        else:
            for x in flat:
                fh.write(f"{float(x.real)!r} {float(x.imag)!r}\n")


def _read_text(path) -> tuple[Tensor3, dict]:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 6 or header[0] != "tensor3":
            raise ValueError(f"{path}: not a tensor container")
        n, m, p = int(header[2]), int(header[3]), int(header[4])
        kind_name = header[5]
        meta_line = fh.readline()
        meta = json.loads(meta_line[5:]) if meta_line.startswith("meta ") else {}
        count = n * m * p
        flat = np.empty(count, dtype=np.complex128)
        for i in range(count):
            parts = fh.readline().split()
            if kind_name == "real":
                flat[i] = float(parts[0])
            else:
                flat[i] = complex(float(parts[0]), float(parts[1]))
    return _tensor_from_entries(flat, n, m, p), meta


def read_frontal_slice_csv(path) -> np.ndarray:
    """One frontal slice from a CSV of numbers (``a+bj`` strings allowed)."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([complex(tok.replace(" ", "")) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    return np.asarray(rows, dtype=np.complex128)


def tensor_from_slice_csvs(paths) -> Tensor3:
    """Stack per-slice CSV files (in order) into a tensor."""
    slices = [read_frontal_slice_csv(p) for p in paths]
    shape = slices[0].shape
    for q, s in zip(paths, slices):
        if s.shape != shape:
            raise ValueError(f"{q}: slice shape {s.shape} differs from {shape}")
    return Tensor3(np.stack(slices, axis=2))


def save_problem(prefix, instance: ProblemInstance, fmt: str = "binary"):
    """Write ``A``, ``X_star``, ``B`` next to each other with shared metadata."""
    ext = "tns" if fmt == "binary" else "txt"
    for role, T in (("A", instance.A), ("X_star", instance.X_star), ("B", instance.B)):
        meta = dict(instance.descriptor, role=role)
        write_tensor(f"{prefix}-{role}.{ext}", T, fmt=fmt, metadata=meta)


def load_problem(prefix, fmt: str = "binary") -> ProblemInstance:
    ext = "tns" if fmt == "binary" else "txt"
    parts = {}
    meta = {}
    for role in ("A", "X_star", "B"):
        T, m = read_tensor(f"{prefix}-{role}.{ext}")
        parts[role] = T
        meta = m
    meta.pop("role", None)
    return ProblemInstance(parts["A"], parts["X_star"], parts["B"], meta)
