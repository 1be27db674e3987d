"""Named-tensor checkpoint files.

Layout (little-endian): b"TSCKPT", u32 version, u32 metadata length, UTF-8
JSON metadata, u32 tensor count, then per tensor: u16 name length, name,
u8 ndim, ndim x u64 shape, float64 payload. Tensors are written in the order
given, so a fixed parameter order gives byte-identical files.
"""
import json
import struct

import numpy as np

MAGIC = b"TSCKPT"
VERSION = 1


def save(path, tensors, meta=None):
    blob = json.dumps(meta or {}, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        fh.write(struct.pack("<I", len(tensors)))
        for name, arr in tensors.items():
            arr = np.asarray(arr, dtype="<f8", order="C")  # keeps 0-d shapes
            nb = name.encode("utf-8")
            fh.write(struct.pack("<H", len(nb)))
            fh.write(nb)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def load(path):
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise ValueError(f"{path}: not a checkpoint")
        version, n_meta = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        meta = json.loads(fh.read(n_meta).decode("utf-8"))
        (count,) = struct.unpack("<I", fh.read(4))
        tensors = {}
        for _ in range(count):
            (ln,) = struct.unpack("<H", fh.read(2))
            name = fh.read(ln).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
            size = int(np.prod(shape)) if ndim else 1
            data = np.frombuffer(fh.read(8 * size), dtype="<f8")
            tensors[name] = data.reshape(shape).astype(np.float64)
    return tensors, meta
