"""Z-score normalisation and PCA projection for the cluster chart."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


def zscore_normalize(matrix):
    """Return ``(normalized, means, stds)`` using the population standard deviation.

    Zero-variance columns become all zeros.
    """
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least two rows")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    z = (x - mean) / safe
    z[:, std == 0] = 0.0
    return z, mean, std


@dataclass(frozen=True)
class Eigenpairs:
    values: np.ndarray   # descending
    vectors: np.ndarray  # columns are unit eigenvectors

    def explained_ratio(self) -> np.ndarray:
        total = self.values.sum()
        return self.values / total if total > 0 else np.zeros_like(self.values)


def pca_fit(normalized) -> Eigenpairs:
    """Eigen-decomposition of the sample covariance, largest eigenvalue first.

    Each eigenvector is signed so its largest-magnitude component is positive.
    Tiny negative eigenvalues from round-off are clipped to zero.
    """
    x = np.asarray(normalized, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least two rows")
    cov = np.cov(x, rowvar=False, ddof=1).reshape(x.shape[1], x.shape[1])
    values, vectors = np.linalg.eigh(cov)
    order = np.argsort(values, kind="stable")[::-1]
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vectors[:, k] = -col
    return Eigenpairs(values, vectors)


def project(matrix, eigen: Eigenpairs, k: int = 2) -> np.ndarray:
    """Coordinates of (normalized) rows on the top ``k`` components."""
    x = np.asarray(matrix, dtype=float)
    if not 1 <= k <= eigen.vectors.shape[1]:
        raise ValueError(f"k must be between 1 and {eigen.vectors.shape[1]}")
    return x @ eigen.vectors[:, :k]


def write_chart_csv(path, item_ids, coords, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["item_id", "pc1", "pc2", "cluster_id"])
        for item, (pc1, pc2), lab in zip(item_ids, coords[:, :2], labels):
            w.writerow([item, repr(float(pc1)), repr(float(pc2)), lab])


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def render_chart_svg(coords, labels, width: int = 640, height: int = 480) -> str:
    """Scatter of the first two components; noise grey, one colour per cluster."""
    pad = 30
    xs, ys = coords[:, 0], coords[:, 1]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    sx = (width - 2 * pad) / (x1 - x0) if x1 > x0 else 0.0
    sy = (height - 2 * pad) / (y1 - y0) if y1 > y0 else 0.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for x, y, lab in zip(xs, ys, labels):
        colour = "#999999" if lab < 0 else _PALETTE[lab % len(_PALETTE)]
        cx = pad + (x - x0) * sx
        cy = height - pad - (y - y0) * sy
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2" fill="{colour}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
