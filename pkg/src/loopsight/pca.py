"""Principal component analysis with retained-variance component selection."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

LEVELS = (1.00, 0.95, 0.90, 0.85, 0.80)


@dataclass
class PCAModel:
    mean: np.ndarray  # (L,)
    components: np.ndarray  # (rank, L), orthonormal rows
    eigenvalues: np.ndarray  # (rank,), descending, sample-covariance scale

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    @property
    def width(self) -> int:
        return len(self.mean)

    @property
    def explained_ratio(self) -> np.ndarray:
        total = self.eigenvalues.sum()
        return self.eigenvalues / total if total > 0 else self.eigenvalues.copy()


def fit_pca(X: np.ndarray) -> PCAModel:
    """Fit on the rows of ``X`` through an SVD of the centred matrix.

    Components with numerically zero variance are discarded, so ``rank`` is
    the numerical rank of the centred data. Each component is signed so its
    first non-negligible coordinate is positive.
    """
    X = np.asarray(X, dtype=float)
    n, width = X.shape
    if n < 2:
        raise ValueError("PCA needs at least two rows")
    mean = X.mean(axis=0)
    centred = X - mean
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    tol = s[0] * max(n, width) * np.finfo(float).eps if s.size and s[0] > 0 else 0.0
    keep = s > tol if s.size and s[0] > 0 else np.zeros_like(s, dtype=bool)
    s, vt = s[keep], vt[keep]
    for row in vt:
        big = np.flatnonzero(np.abs(row) > 1e-12)
        if big.size and row[big[0]] < 0:
            row *= -1
    return PCAModel(mean, vt.copy(), s**2 / (n - 1))


def select_components(model_or_ratios, level: float) -> int:
    """Smallest k whose cumulative explained ratio reaches ``level``; level 1.0 gives the rank."""
    if not 0.0 < level <= 1.0:
        raise ValueError("retained-variance level must lie in (0, 1]")
    ratios = model_or_ratios.explained_ratio if isinstance(model_or_ratios, PCAModel) else np.asarray(model_or_ratios, dtype=float)
    rank = len(ratios)
    if level >= 1.0:
        return rank
    cumulative = np.cumsum(ratios)
    # Cumulative sums can land a hair under an exactly attainable level.
    k = int(np.searchsorted(cumulative, level - 1e-12, side="left")) + 1
    return min(k, rank)


def transform(model: PCAModel, X: np.ndarray, k: int | None = None) -> np.ndarray:
    k = model.rank if k is None else k
    if k > model.rank:
        raise ValueError(f"k={k} exceeds the model rank {model.rank}")
    if k < 0:
        raise ValueError("k must be non-negative")
    X = np.asarray(X, dtype=float)
    return (X - model.mean) @ model.components[:k].T


def inverse_transform(model: PCAModel, Z: np.ndarray) -> np.ndarray:
    k = Z.shape[1]
    return Z @ model.components[:k] + model.mean


def save_pca(model: PCAModel, path) -> None:
    """Plain-text format: ``L k_max`` header, mean row, eigenvalue row, one row per component."""
    rows = [f"{model.width} {model.rank}", _row(model.mean), _row(model.eigenvalues)]
    rows += [_row(c) for c in model.components]
    Path(path).write_text("\n".join(rows) + "\n")


def load_pca(path) -> PCAModel:
    lines = Path(path).read_text().splitlines()
    width, k = (int(v) for v in lines[0].split())
    mean = _parse(lines[1], width)
    eig = _parse(lines[2], k)
    comps = np.array([_parse(line, width) for line in lines[3 : 3 + k]]).reshape(k, width)
    return PCAModel(mean, comps, eig)


def _row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _parse(line: str, n: int) -> np.ndarray:
    values = np.array([float(v) for v in line.split()], dtype=float)
    if values.size != n:
        raise ValueError(f"expected {n} values, found {values.size}")
    return values
