"""Nearest-neighbour and k-nearest-neighbour classification.

Distances are plain Euclidean over the raw 8-feature vectors (no
normalization; the model header records that explicitly).  All
tie-breaks are deterministic: distance ties at the k-boundary go to the
lower sample index, vote ties to the tied label with the smallest
summed voter distance, then to lexicographic label order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from scriptid._util import write_text_atomic
from scriptid.features import FEATURE_NAMES

__all__ = [
    "EvalReport",
    "Model",
    "ModelFormatError",
    "classify_knn",
    "classify_nn",
    "distance",
    "evaluate",
    "leave_one_out",
    "load_model",
    "save_model",
]

MODEL_VERSION = 1

# the four scripts the toolkit ships fixtures for; models may declare others
KANNADA = "Kannada"
TELUGU = "Telugu"
DEVNAGARI = "Devnagari"
ENGLISH_NUMERAL = "EnglishNumeral"


class ModelFormatError(ValueError):
    """Unreadable, unknown-version or incompatible model file."""


@dataclass(frozen=True)
class Model:
    """Labeled training samples plus classifier metadata."""

    vectors: np.ndarray  # (n, 8) float64
    labels: tuple[str, ...]
    k: int = 3
    feature_order: tuple[str, ...] = FEATURE_NAMES
    version: int = MODEL_VERSION
    label_set: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != len(FEATURE_NAMES):
            raise ValueError(f"vectors must be (n, {len(FEATURE_NAMES)}), got {v.shape}")
        if v.shape[0] == 0:
            raise ValueError("model needs at least one sample")
        if len(self.labels) != v.shape[0]:
            raise ValueError("one label per sample required")
        if self.feature_order != FEATURE_NAMES:
            raise ValueError(f"feature order must be {FEATURE_NAMES}")
        if not 1 <= self.k <= v.shape[0]:
            raise ValueError(f"k={self.k} must lie in 1..{v.shape[0]}")
        if self.k % 2 == 0:
            raise ValueError(f"k must be odd, got {self.k}")
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "label_set", tuple(sorted(set(self.labels))))

    def __len__(self) -> int:
        return self.vectors.shape[0]


def distance(a, b) -> float:
    """Euclidean distance between two feature vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _distances(model: Model, v) -> np.ndarray:
    q = np.asarray(v, dtype=np.float64)
    return np.sqrt(((model.vectors - q) ** 2).sum(axis=1))


def _vote(model: Model, dists: np.ndarray, order: np.ndarray, k: int) -> tuple[str, dict[str, int]]:
    voters = order[:k]
    votes: dict[str, int] = {}
    dist_sum: dict[str, float] = {}
    for i in voters:
        lab = model.labels[i]
        votes[lab] = votes.get(lab, 0) + 1
        dist_sum[lab] = dist_sum.get(lab, 0.0) + float(dists[i])
    top = max(votes.values())
    tied = [lab for lab, n in votes.items() if n == top]
    winner = min(tied, key=lambda lab: (dist_sum[lab], lab))
    return winner, votes


def classify_nn(model: Model, v) -> tuple[str, float]:
    """Label of the closest training sample (ties: lowest index)."""
    dists = _distances(model, v)
    i = int(np.argmin(dists))
    return model.labels[i], float(dists[i])


def classify_knn(model: Model, v, k: int | None = None) -> tuple[str, dict[str, int]]:
    """Majority label among the k nearest samples, plus the vote counts."""
    if k is None:
        k = model.k
    if not 1 <= k <= len(model):
        raise ValueError(f"k={k} must lie in 1..{len(model)}")
    dists = _distances(model, v)
    order = np.argsort(dists, kind="stable")
    return _vote(model, dists, order, k)


@dataclass(frozen=True)
class EvalReport:
    """Confusion matrix and accuracies over a labeled test set."""

    label_order: tuple[str, ...]
    confusion: np.ndarray  # confusion[i][j] = count of true-i predicted-j
    per_class: dict[str, float]
    overall: float
    total: int


def _make_report(label_order, true_labels, pred_labels) -> EvalReport:
    index = {lab: i for i, lab in enumerate(label_order)}
    conf = np.zeros((len(label_order), len(label_order)), dtype=np.int64)
    for t, p in zip(true_labels, pred_labels):
        conf[index[t], index[p]] += 1
    row_sums = conf.sum(axis=1)
    per_class = {}
    for i, lab in enumerate(label_order):
        per_class[lab] = float(conf[i, i] / row_sums[i]) if row_sums[i] else 0.0
    total = int(conf.sum())
    overall = float(np.trace(conf) / total) if total else 0.0
    return EvalReport(
        label_order=tuple(label_order),
        confusion=conf,
        per_class=per_class,
        overall=overall,
        total=total,
    )


def evaluate(model: Model, test: list[tuple[np.ndarray, str]], k: int | None = None) -> EvalReport:
    """Classify a labeled test set; report confusion and accuracies."""
    if not test:
        raise ValueError("test set must be nonempty")
    if k is None:
        k = model.k
    preds = [classify_knn(model, vec, k)[0] for vec, _ in test]
    truths = [lab for _, lab in test]
    label_order = sorted(set(model.label_set) | set(truths))
    return _make_report(label_order, truths, preds)


def leave_one_out(model: Model, k: int | None = None) -> EvalReport:
    """Classify each sample against the model minus itself."""
    if k is None:
        k = model.k
    n = len(model)
    if n < k + 1:
        raise ValueError(f"leave-one-out needs at least k+1={k + 1} samples, have {n}")
    v = model.vectors
    preds = []
    for i in range(n):
        dists = np.sqrt(((v - v[i]) ** 2).sum(axis=1))
        dists[i] = np.inf  # self sorts last; index order otherwise intact
        order = np.argsort(dists, kind="stable")
        preds.append(_vote(model, dists, order, k)[0])
    return _make_report(model.label_set, model.labels, preds)


# ---------------------------------------------------------------------------
# model file format: line-oriented text, version header + one sample per line


def save_model(path: str, model: Model) -> None:
    for lab in model.label_set:
        if any(ch in lab for ch in ",=\n\r"):
            raise ValueError(f"label {lab!r} contains reserved characters")
    lines = [
        f"version={model.version}",
        f"k={model.k}",
        "features=" + ",".join(model.feature_order),
        "normalization=none",
    ]
    for vec, lab in zip(model.vectors, model.labels):
        lines.append(lab + "," + ",".join(repr(float(x)) for x in vec))
    write_text_atomic(path, "\n".join(lines) + "\n")


def load_model(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        raw = [ln.rstrip("\n") for ln in fh if ln.strip()]
    headers: dict[str, str] = {}
    body_at = 0
    for line in raw:
        key, eq, value = line.partition("=")
        if not eq or "," in key:
            break
        if key in headers:
            raise ModelFormatError(f"{path}: duplicate header {key!r}")
        if key not in ("version", "k", "features", "normalization"):
            raise ModelFormatError(f"{path}: unknown header {key!r}")
        headers[key] = value
        body_at += 1
    for required in ("version", "k", "features", "normalization"):
        if required not in headers:
            raise ModelFormatError(f"{path}: missing header {required!r}")
    if headers["version"] != str(MODEL_VERSION):
        raise ModelFormatError(f"{path}: unsupported version {headers['version']!r}")
    if headers["normalization"] != "none":
        raise ModelFormatError(f"{path}: unsupported normalization {headers['normalization']!r}")
    feature_order = tuple(headers["features"].split(","))
    if feature_order != FEATURE_NAMES:
        raise ModelFormatError(
            f"{path}: feature order mismatch: {feature_order} != {FEATURE_NAMES}"
        )
    try:
        k = int(headers["k"])
    except ValueError:
        raise ModelFormatError(f"{path}: bad k {headers['k']!r}") from None

    vectors = []
    labels = []
    for line in raw[body_at:]:
        parts = line.split(",")
        if len(parts) != 1 + len(FEATURE_NAMES):
            raise ModelFormatError(f"{path}: malformed sample line {line!r}")
        labels.append(parts[0])
        try:
            vectors.append([float(x) for x in parts[1:]])
        except ValueError:
            raise ModelFormatError(f"{path}: non-numeric feature in {line!r}") from None
    if not vectors:
        raise ModelFormatError(f"{path}: no samples")
    try:
        return Model(
            vectors=np.array(vectors, dtype=np.float64),
            labels=tuple(labels),
            k=k,
            feature_order=feature_order,
        )
    except ValueError as exc:
        raise ModelFormatError(f"{path}: {exc}") from None
