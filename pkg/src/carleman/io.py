"""Flat-file import/export for grid weights and grid functions.

Two layouts, selected by file extension:

* ``.csv`` -- text: one header line
  ``#carleman-grid,v1,kind=<weight|function>,n=<n>,L=<repr(L)>,N=<N>,offset=<repr>``
  followed by ``index,value`` rows (weights) or ``index,re,im`` rows
  (functions), flat C-order indices.
* ``.bin`` -- binary: magic line ``CGRD1``, a one-line JSON header with the
  same fields, then the raw little-endian float64 (weights) or complex128
  (functions) array.

Floats in headers use ``repr`` so round-trips are lossless.
"""

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .spectral import GridFunction
from .weights import GridWeight

__all__ = [
    "save_grid_weight",
    "load_grid_weight",
    "save_grid_function",
    "load_grid_function",
]

_MAGIC = b"CGRD1"


def _header_fields(kind, n, L, N, offset):
    return {"kind": kind, "n": int(n), "L": float(L), "N": int(N),
            "offset": float(offset)}


def _write(path: Path, kind: str, n: int, L: float, N: int, offset: float,
           flat: np.ndarray, columns: int):
    if path.suffix == ".csv":
        with open(path, "w") as fh:
            fh.write(f"#carleman-grid,v1,kind={kind},n={n},L={float(L)!r},N={N},"
                     f"offset={float(offset)!r}\n")
            if columns == 1:
                for i, v in enumerate(flat.tolist()):
                    fh.write(f"{i},{v!r}\n")
            else:
                for i, v in enumerate(flat.tolist()):
                    fh.write(f"{i},{v.real!r},{v.imag!r}\n")
    elif path.suffix == ".bin":
        with open(path, "wb") as fh:
            fh.write(_MAGIC + b"\n")
            fh.write(json.dumps(_header_fields(kind, n, L, N, offset),
                                sort_keys=True).encode() + b"\n")
            dtype = "<f8" if columns == 1 else "<c16"
            fh.write(np.ascontiguousarray(flat).astype(dtype).tobytes())
    else:
        raise ConfigError(f"unsupported grid file extension {path.suffix!r} (use .csv or .bin)")


def _read(path: Path):
    if path.suffix == ".csv":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("#carleman-grid,v1,"):
                raise ConfigError(f"{path}: not a carleman grid file")
            fields = dict(item.split("=", 1) for item in header.split(",")[2:])
            meta = {"kind": fields["kind"], "n": int(fields["n"]),
                    "L": float(fields["L"]), "N": int(fields["N"]),
                    "offset": float(fields["offset"])}
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if meta["kind"] == "weight":
            flat = np.empty(len(rows))
            for row in rows:
                flat[int(row[0])] = float(row[1])
        else:
            flat = np.empty(len(rows), dtype=np.complex128)
            for row in rows:
                flat[int(row[0])] = complex(float(row[1]), float(row[2]))
        return meta, flat
    if path.suffix == ".bin":
        raw = path.read_bytes()
        if not raw.startswith(_MAGIC + b"\n"):
            raise ConfigError(f"{path}: not a carleman grid file")
        nl = raw.index(b"\n", len(_MAGIC) + 1)
        meta = json.loads(raw[len(_MAGIC) + 1: nl])
        dtype = "<f8" if meta["kind"] == "weight" else "<c16"
        flat = np.frombuffer(raw[nl + 1:], dtype=dtype).copy()
        return meta, flat
    raise ConfigError(f"unsupported grid file extension {path.suffix!r} (use .csv or .bin)")


def save_grid_weight(w: GridWeight, path) -> None:
    _write(Path(path), "weight", w.n, w.L, w.N, 0.5, w.values.ravel(), 1)


def load_grid_weight(path) -> GridWeight:
    meta, flat = _read(Path(path))
    if meta["kind"] != "weight":
        raise ConfigError(f"{path}: expected a weight grid, found {meta['kind']}")
    shape = (meta["N"],) * meta["n"]
    return GridWeight(n=meta["n"], L=meta["L"], N=meta["N"],
                      values=flat.reshape(shape))


def save_grid_function(f: GridFunction, path) -> None:
    _write(Path(path), "function", f.n, f.L, f.N, f.node_offset,
           f.values.ravel(), 2)


def load_grid_function(path) -> GridFunction:
    meta, flat = _read(Path(path))
    if meta["kind"] != "function":
        raise ConfigError(f"{path}: expected a function grid, found {meta['kind']}")
    shape = (meta["N"],) * meta["n"]
    return GridFunction(n=meta["n"], L=meta["L"], N=meta["N"],
                        values=flat.reshape(shape), node_offset=meta["offset"])
