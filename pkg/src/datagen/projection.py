"""2-D principal-component view of a client's training data."""

import csv
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .records import Record, records_to_arrays, render_float


def project_2d(records: Sequence[Record]) -> np.ndarray:
    """Project centered features onto the top two principal axes, shape (n, 2)."""
    features, _ = records_to_arrays(records)
    centered = features - features.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    axes = vt[:2]
    # Fix the SVD sign ambiguity: largest loading of each axis is positive.
    signs = np.sign(axes[np.arange(axes.shape[0]), np.abs(axes).argmax(axis=1)])
    signs[signs == 0] = 1.0
    return centered @ (axes * signs[:, None]).T


def write_projection(records: Sequence[Record], path: Union[str, Path]) -> Path:
    path = Path(path)
    coords = project_2d(records)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["pc1", "pc2", "label"])
        for (pc1, pc2), record in zip(coords, records):
            writer.writerow([render_float(pc1), render_float(pc2), record.label])
    return path
