"""Plain-text storage for realizations.

Format: a `window xmin ymin xmax ymax` header line, optional `label <tag>`
and `seed <u64>` lines, then one `x y` coordinate pair per line.  Floats
are written with 17 significant digits so a read back is bit-exact.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geometry import Realization, Window


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_realization(r: Realization, path: str | os.PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    w = r.window
    lines = [f"window {_fmt(w.xmin)} {_fmt(w.ymin)} {_fmt(w.xmax)} {_fmt(w.ymax)}"]
    if r.label is not None:
        lines.append(f"label {r.label}")
    if r.seed is not None:
        lines.append(f"seed {int(r.seed)}")
    for x, y in r.points:
        lines.append(f"{_fmt(x)} {_fmt(y)}")
    path.write_text("\n".join(lines) + "\n")


def read_realization(path: str | os.PathLike) -> Realization:
    path = Path(path)
    window: Window | None = None
    label: str | None = None
    seed: int | None = None
    xs: list[float] = []
    ys: list[float] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "window":
            if len(tokens) != 5:
                raise ValueError(f"{path}:{lineno}: window header needs 4 numbers")
            window = Window(*(float(t) for t in tokens[1:]))
        elif tokens[0] == "label":
            label = tokens[1] if len(tokens) > 1 else ""
        elif tokens[0] == "seed":
            seed = int(tokens[1])
        else:
            if len(tokens) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            xs.append(float(tokens[0]))
            ys.append(float(tokens[1]))
    if window is None:
        raise ValueError(f"{path}: missing 'window' header line")
    pts = np.column_stack([xs, ys]) if xs else np.empty((0, 2))
    return Realization(pts, window, label=label, seed=seed)


def batch_paths(directory: str | os.PathLike, count: int) -> list[Path]:
    """Canonical file names r00000.txt .. r{count-1:05d}.txt under directory."""
    directory = Path(directory)
    return [directory / f"r{i:05d}.txt" for i in range(count)]


def write_batch(realizations: Sequence[Realization], directory: str | os.PathLike) -> list[Path]:
    """One file per realization, named by index; returns the paths."""
    paths = batch_paths(directory, len(realizations))
    for r, p in zip(realizations, paths):
        write_realization(r, p)
    return paths


def read_batch(directory: str | os.PathLike) -> list[Realization]:
    """All r*.txt files under directory, in index order."""
    directory = Path(directory)
    paths = sorted(directory.glob("r*.txt"))
    if not paths:
        raise FileNotFoundError(f"no realization files under {directory}")
    return [read_realization(p) for p in paths]


def read_many(paths: Iterable[str | os.PathLike]) -> list[Realization]:
    return [read_realization(p) for p in paths]
