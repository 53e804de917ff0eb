import json
import os
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from subsystem_codes.gf2 import BinaryMatrix

PathLike = Union[str, Path]


def create_dir_if_dont_exist(path: Path):
    path = Path(path)
    if not path.exists():
        os.makedirs(f"{path}/")
    return path


def read_dense(path: PathLike) -> BinaryMatrix:
    with open(path) as f:
        return BinaryMatrix.from_text(f.read())


def write_dense(matrix: BinaryMatrix, path: PathLike):
    with open(path, "w") as f:
        f.write(matrix.to_text())


def read_alist(path: PathLike) -> BinaryMatrix:
    """Reads a MacKay alist file (1-based indices, zero padding allowed) as a checks x variables matrix."""
    with open(path) as f:
        lines = [line.split() for line in f.read().splitlines() if line.strip()]
    try:
        numbers = [[int(x) for x in line] for line in lines]
    except ValueError as e:
        raise ValueError(f"Invalid alist file {path}: {e}")
    if len(numbers) < 4 or len(numbers[0]) != 2:
        raise ValueError(f"Invalid alist file {path}: missing header lines")
    n, m = numbers[0]
    col_degrees, row_degrees = numbers[2], numbers[3]
    if len(col_degrees) != n or len(row_degrees) != m:
        raise ValueError(f"Invalid alist file {path}: degree lists do not match {n} columns and {m} rows")
    if len(numbers) < 4 + n:
        raise ValueError(f"Invalid alist file {path}: expected {n} column lines")
    h = np.zeros((m, n), dtype=np.uint8)
    for j, (line, degree) in enumerate(zip(numbers[4 : 4 + n], col_degrees)):
        checks = [i for i in line if i != 0]
        if len(checks) != degree:
            raise ValueError(f"Invalid alist file {path}: column {j + 1} has {len(checks)} entries, expected {degree}")
        for i in checks:
            if not 1 <= i <= m:
                raise ValueError(f"Invalid alist file {path}: row index {i} out of range")
            h[i - 1, j] = 1
    if not np.array_equal(h.sum(axis=1), np.array(row_degrees)):
        raise ValueError(f"Invalid alist file {path}: row degrees disagree with column lists")
    return BinaryMatrix.from_array(h)


def write_alist(h: BinaryMatrix, path: PathLike):
    dense = h.to_array()
    m, n = dense.shape
    col_lists = [(np.flatnonzero(dense[:, j]) + 1).tolist() for j in range(n)]
    row_lists = [(np.flatnonzero(dense[i]) + 1).tolist() for i in range(m)]
    max_col = max((len(c) for c in col_lists), default=0)
    max_row = max((len(r) for r in row_lists), default=0)
    lines = [f"{n} {m}", f"{max_col} {max_row}"]
    lines.append(" ".join(str(len(c)) for c in col_lists))
    lines.append(" ".join(str(len(r)) for r in row_lists))
    lines.extend(" ".join(map(str, c + [0] * (max_col - len(c)))) for c in col_lists)
    lines.extend(" ".join(map(str, r + [0] * (max_row - len(r)))) for r in row_lists)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_parity_check(path: PathLike) -> BinaryMatrix:
    """Accepts either an alist or a dense text file, told apart by the second line."""
    with open(path) as f:
        lines = f.read().splitlines()
    if len(lines) > 1 and set(lines[1].strip()) <= {"0", "1"} and len(lines[1].split()) == 1:
        return read_dense(path)
    return read_alist(path)


def read_json(path: PathLike) -> Dict:
    with open(path) as f:
        return json.load(f)


def write_json(data: Dict, path: PathLike):
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def write_gnuplot(rows: List[List[float]], header: List[str], path: PathLike):
    with open(path, "w") as f:
        f.write("# " + " ".join(header) + "\n")
        for row in rows:
            f.write(" ".join(f"{value:.10g}" for value in row) + "\n")
