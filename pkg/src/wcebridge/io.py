"""File emitters for the experiment outputs.

Every file carries a header block of ``# key=value`` lines recording the
config hash, seed, and artifact version, then the documented payload:

  paths CSV     header row ``path_id,t,y``; UTF-8, LF line endings, '.'
                decimal separator; floats written shortest-roundtrip
  paths binary  magic "WCEB", then little-endian u32 version, u32 N (steps),
                u32 n_paths, then n_paths * (N+1) row-major float64 values
  JSON records  payload dict under the documented keys plus a "meta" object
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .propagator import TimeGrid

BIN_MAGIC = b"WCEB"
BIN_VERSION = 1


def header_lines(meta: dict) -> list[str]:
    return [f"# {key}={meta[key]}" for key in meta]


def write_paths_csv(path: Path, grid: TimeGrid, paths: np.ndarray, meta: dict) -> None:
    paths = np.atleast_2d(paths)
    t = grid.nodes
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines(meta):
            fh.write(line + "\n")
        fh.write("path_id,t,y\n")
        for pid in range(paths.shape[0]):
            row = paths[pid]
            fh.write(
                "".join(f"{pid},{float(t[j])!r},{float(row[j])!r}\n" for j in range(t.size))
            )


def read_paths_csv(path: Path) -> tuple[dict, np.ndarray, np.ndarray]:
    """Returns (meta, times-of-first-path, matrix of y values)."""
    meta: dict = {}
    ids, ts, ys = [], [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
                continue
            if line.startswith("path_id"):
                continue
            pid, t, y = line.split(",")
            ids.append(int(pid))
            ts.append(float(t))
            ys.append(float(y))
    ids_arr = np.asarray(ids)
    n_paths = ids_arr.max() + 1 if ids_arr.size else 0
    nodes = ids_arr.size // max(n_paths, 1)
    return meta, np.asarray(ts[:nodes]), np.asarray(ys).reshape(n_paths, nodes)


def write_paths_bin(path: Path, grid: TimeGrid, paths: np.ndarray) -> None:
    paths = np.ascontiguousarray(np.atleast_2d(paths), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(BIN_MAGIC)
        fh.write(struct.pack("<III", BIN_VERSION, grid.N, paths.shape[0]))
        fh.write(paths.tobytes())


def read_paths_bin(path: Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != BIN_MAGIC:
        raise ValueError("not a bridge path dump (bad magic)")
    version, n_steps, n_paths = struct.unpack_from("<III", raw, 4)
    if version != BIN_VERSION:
        raise ValueError(f"unsupported dump version {version}")
    values = np.frombuffer(raw, dtype="<f8", offset=16)
    return values.reshape(n_paths, n_steps + 1)


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_table_csv(path: Path, header: list[str], rows: list[list], meta: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines(meta):
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(repr(float(c)) if isinstance(c, float) else str(c) for c in row) + "\n"
            )
