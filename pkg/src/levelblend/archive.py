"""Byte-stable zip containers of named numpy arrays plus a JSON header."""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path
from typing import Mapping

import numpy as np

_ZIP_TIME = (1980, 1, 1, 0, 0, 0)


def _member(zf: zipfile.ZipFile, name: str, payload: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_ZIP_TIME)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    zf.writestr(info, payload)


def write_archive(path, meta: Mapping, arrays: Mapping[str, np.ndarray]) -> None:
    """Entries are written in the given order with fixed timestamps."""
    with zipfile.ZipFile(path, "w") as zf:
        _member(zf, "meta.json", json.dumps(meta, indent=2, sort_keys=True).encode())
        for name, arr in arrays.items():
            buf = io.BytesIO()
            arr = np.asarray(arr)
            np.lib.format.write_array(buf, np.ascontiguousarray(arr, dtype=arr.dtype.newbyteorder("<")),
                                      allow_pickle=False)
            _member(zf, name + ".npy", buf.getvalue())


def read_archive(path) -> tuple[dict, dict[str, np.ndarray]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with zipfile.ZipFile(path) as zf:
        meta = json.loads(zf.read("meta.json"))
        arrays = {}
        for name in zf.namelist():
            if name.endswith(".npy"):
                arrays[name[:-4]] = np.lib.format.read_array(io.BytesIO(zf.read(name)), allow_pickle=False)
    return meta, arrays
