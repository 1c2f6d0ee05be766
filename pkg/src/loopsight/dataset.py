"""Corpus assembly, fixed-width encoding, standardization and the 70/15/15 split."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from loopsight.codegen.program import ClassLabel
from loopsight.lang import PAD_ID, LexError, TokenVocab, encode, tokenize

SPLIT = (0.70, 0.15, 0.15)


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class LabeledSequence:
    ids: tuple[int, ...]
    label: int
    source: str = ""

    def __post_init__(self):
        if not self.ids:
            raise ValueError("empty token sequence")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


def assemble_corpus(dirs, vocab: TokenVocab) -> list[LabeledSequence]:
    """Tokenize and encode every ``*.py`` file of each ``(directory, label)`` pair.

    Directories are read in the given order and files in lexicographic order.
    The vocabulary grows during assembly and is frozen afterwards.
    """
    seqs: list[LabeledSequence] = []
    for directory, label in dirs:
        label = ClassLabel(label)
        files = sorted(Path(directory).glob("*.py"))
        if not files:
            raise CorpusError(f"empty corpus directory: {directory}")
        for path in files:
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise CorpusError(f"cannot read {path}: {exc}") from exc
            try:
                tokens = tokenize(text)
            except LexError as exc:
                raise CorpusError(f"{path}: {exc}") from exc
            if not tokens:
                raise CorpusError(f"{path}: no tokens")
            seqs.append(LabeledSequence(tuple(encode(tokens, vocab)), int(label), str(path)))
    vocab.freeze()
    return seqs


def pad_truncate(seqs, width: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Right-pad with the PAD id (or truncate) every sequence to ``width`` columns.

    ``seqs`` holds LabeledSequence objects or plain id sequences (label -1 then).
    Without ``width`` the longest sequence sets it.
    """
    ids = [s.ids if isinstance(s, LabeledSequence) else tuple(s) for s in seqs]
    labels = np.array([s.label if isinstance(s, LabeledSequence) else -1 for s in seqs], dtype=np.int64)
    if width is None:
        width = max((len(x) for x in ids), default=1)
    if width < 1:
        raise ValueError("width must be at least 1")
    X = np.full((len(ids), width), float(PAD_ID))
    for row, seq in enumerate(ids):
        head = seq[:width]
        X[row, : len(head)] = head
    return X, labels


def sequence_lengths(X: np.ndarray) -> np.ndarray:
    """Unpadded length of each row (PAD never occurs inside a sequence)."""
    nonzero = X != PAD_ID
    has_any = nonzero.any(axis=1)
    last = X.shape[1] - np.argmax(nonzero[:, ::-1], axis=1)
    return np.where(has_any, last, 0)


@dataclass
class FeatureScaler:
    mean: np.ndarray
    std: np.ndarray

    @property
    def constant(self) -> np.ndarray:
        return self.std == 0


def fit_scaler(train: np.ndarray) -> FeatureScaler:
    train = np.asarray(train, dtype=float)
    if train.shape[0] == 0:
        raise ValueError("cannot fit a scaler on an empty matrix")
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    # Columns whose spread is pure float noise count as constant.
    std[std <= 1e-12 * np.maximum(1.0, np.abs(mean))] = 0.0
    return FeatureScaler(mean, std)


def apply_scaler(scaler: FeatureScaler, X: np.ndarray) -> np.ndarray:
    """z-score with training statistics; constant columns are only shifted by their mean."""
    X = np.asarray(X, dtype=float)
    denom = np.where(scaler.constant, 1.0, scaler.std)
    return (X - scaler.mean) / denom


@dataclass
class DataSplit:
    X_train: np.ndarray
    y_train: np.ndarray
    X_val: np.ndarray
    y_val: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    indices: tuple[np.ndarray, np.ndarray, np.ndarray]


def split_sizes(n: int, proportions=SPLIT) -> tuple[int, int, int]:
    if abs(sum(proportions) - 1.0) > 1e-9:
        raise ValueError("split proportions must sum to 1")
    n_val = round(n * proportions[1])
    n_test = round(n * proportions[2])
    n_train = n - n_val - n_test
    return n_train, n_val, n_test


def split_corpus(X: np.ndarray, y: np.ndarray, proportions=SPLIT, rng: np.random.Generator | int = 0) -> DataSplit:
    """Shuffle rows once with ``rng`` and cut them into train/val/test (unstratified)."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = len(X)
    sizes = split_sizes(n, proportions)
    if min(sizes) <= 0:
        raise ValueError(f"split of {n} rows leaves an empty part: {sizes}")
    order = rng.permutation(n)
    tr = order[: sizes[0]]
    va = order[sizes[0] : sizes[0] + sizes[1]]
    te = order[sizes[0] + sizes[1] :]
    return DataSplit(X[tr], y[tr], X[va], y[va], X[te], y[te], (tr, va, te))


# --- dataset cache -----------------------------------------------------------


def write_dataset(out_dir, X: np.ndarray, y: np.ndarray, meta: dict) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width = X.shape[1]
    with open(out / "dataset.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"x{j}" for j in range(width)])
        for label, row in zip(y, X):
            writer.writerow([int(label)] + [int(v) for v in row])
    (out / "dataset.json").write_text(json.dumps(meta | {"width": width, "rows": len(X)}, indent=1, sort_keys=True) + "\n")


def read_dataset(path) -> tuple[np.ndarray, np.ndarray, dict]:
    path = Path(path)
    csv_path = path / "dataset.csv" if path.is_dir() else path
    meta_path = csv_path.with_name("dataset.json")
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "label":
            raise CorpusError(f"{csv_path}: header must start with 'label'")
        rows = [list(map(int, r)) for r in reader]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return data[:, 1:], data[:, 0].astype(np.int64), meta


def build_dataset(pos_dirs, neg_dirs, out_dir, width: int | None = None, seed: int = 0) -> dict:
    """Assemble, encode and cache a labelled corpus; returns the metadata written."""
    from loopsight.lang import save_vocab

    vocab = TokenVocab()
    dirs = [(d, ClassLabel.INDEPENDENT) for d in pos_dirs] + [(d, ClassLabel.AMBIGUOUS) for d in neg_dirs]
    seqs = assemble_corpus(dirs, vocab)
    X, y = pad_truncate(seqs, width)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_vocab(vocab, out / "vocab.json")
    meta = {
        "vocab": "vocab.json",
        "seed": seed,
        "pos": [str(d) for d in pos_dirs],
        "neg": [str(d) for d in neg_dirs],
        "positives": int((y == 1).sum()),
        "negatives": int((y == 0).sum()),
        "max_length": int(max(len(s.ids) for s in seqs)),
    }
    write_dataset(out, X, y, meta)
    return meta | {"width": X.shape[1], "rows": len(X)}
