"""Writers for TASP grids (CSV, PGM) and structured results (JSON)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import TaspGrid


def write_tasp_csv(grid: TaspGrid, path) -> None:
    """Columns kx, ky, sx, sy, sz; kx index outer, ky index inner; 9 significant digits."""
    ks = grid.ks
    with open(path, "w", newline="") as fh:
        fh.write("kx,ky,sx,sy,sz\n")
        for i in range(grid.grid_n):
            for j in range(grid.grid_n):
                v = grid.data[i, j]
                fh.write(f"{ks[i]:.9g},{ks[j]:.9g},{v[0]:.9g},{v[1]:.9g},{v[2]:.9g}\n")


def read_tasp_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (k (m, 2), tasp (m, 3)) in file order."""
    a = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return a[:, :2], a[:, 2:]


def to_gray(f: np.ndarray) -> np.ndarray:
    """Linear map [-1, 1] -> [0, 255]; out-of-range values are clipped."""
    return np.clip(np.rint((np.asarray(f) + 1.0) * 127.5), 0, 255).astype(np.uint8)


def write_pgm(f: np.ndarray, path) -> None:
    """Binary graymap of f[i, j] with kx along columns and ky increasing upward."""
    img = to_gray(f).T[::-1]
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(img).tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def write_tasp_images(grid: TaspGrid, out_dir) -> list[Path]:
    out = []
    for name, f in (("sx", grid.sx), ("sy", grid.sy), ("sz", grid.sz)):
        p = Path(out_dir) / f"tasp_{name}.pgm"
        write_pgm(f, p)
        out.append(p)
    return out


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def write_rows_csv(rows: list[dict], path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
