"""Per-user learning core: normalisation, kNN, LOO accuracy and SFS.

Every tie is broken by an explicit, documented rule so that identical
training data yields identical models on every platform:

  distances   - equal neighbour distances prefer the lower training index
  votes       - equal vote counts prefer the class with the smaller summed
                distance among its voting neighbours, then class order
  features    - equal SFS candidate accuracies prefer the lower index
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .features import FeatureVector


class LearnError(Exception):
    pass


@dataclass
class LabeledDataset:
    """Training vectors with per-item labels.

    vectors is an (n, n_features) array; class_names fixes the label
    order used by the vote tie rule.
    """

    vectors: np.ndarray
    labels: list[str]
    class_names: list[str]

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise LearnError("vectors must be a 2-D array")
        if len(self.vectors) != len(self.labels):
            raise LearnError("vectors and labels must have equal length")
        if len(self.class_names) != len(set(self.class_names)):
            raise LearnError("class_names must be unique")
        unknown = set(self.labels) - set(self.class_names)
        if unknown:
            raise LearnError(f"labels outside class_names: {sorted(unknown)}")

    @classmethod
    def from_feature_vectors(cls, vectors: Sequence[FeatureVector], labels: Sequence[str],
                             class_names: Sequence[str]) -> "LabeledDataset":
        return cls(np.stack([v.values for v in vectors]), list(labels), list(class_names))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class Normalizer:
    """Per-feature mean and population standard deviation of the training set.

    Constant features store std 0 and normalise to exactly 0.
    """

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64))
        object.__setattr__(self, "std", np.asarray(self.std, dtype=np.float64))
        if self.mean.shape != self.std.shape:
            raise LearnError("mean and std must have matching shapes")


@dataclass
class SelectionResult:
    """SFS outcome: admission order, LOO accuracy after each admission."""

    selected: list[int]
    accuracy_trace: list[float] = field(default_factory=list)

    @property
    def final_accuracy(self) -> float:
        return self.accuracy_trace[-1]


class KnnResult(NamedTuple):
    label: str
    distances: np.ndarray


def fit_normalizer(dataset: LabeledDataset) -> Normalizer:
    if len(dataset) == 0:
        raise LearnError("cannot fit a normalizer on an empty dataset")
    mean = dataset.vectors.mean(axis=0)
    std = dataset.vectors.std(axis=0)
    return Normalizer(mean, std)


def normalize(values: np.ndarray, norm: Normalizer) -> np.ndarray:
    """z-score with the std-0 convention: constant coordinates map to 0."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[-1] != norm.mean.shape[0]:
        raise LearnError("vector length does not match the normalizer")
    z = np.zeros_like(values, dtype=np.float64)
    nonconst = norm.std > 0
    z[..., nonconst] = (values[..., nonconst] - norm.mean[nonconst]) / norm.std[nonconst]
    return z


def _validate_mask(mask: Sequence[int], n_features: int) -> np.ndarray:
    mask = np.asarray(list(mask), dtype=int)
    if mask.size == 0:
        raise LearnError("feature mask must be non-empty")
    if len(set(mask.tolist())) != mask.size:
        raise LearnError("feature mask indices must be unique")
    if mask.min() < 0 or mask.max() >= n_features:
        raise LearnError(f"feature mask indices must lie in [0, {n_features - 1}]")
    return mask


def _vote(neighbor_labels: list[str], neighbor_distances: np.ndarray,
          class_names: list[str]) -> str:
    """Majority vote; ties by smallest summed distance, then class order."""
    tally: dict[str, list[float]] = {}
    for label, dist in zip(neighbor_labels, neighbor_distances):
        tally.setdefault(label, []).append(float(dist))
    best_votes = max(len(d) for d in tally.values())
    tied = [c for c, d in tally.items() if len(d) == best_votes]
    if len(tied) == 1:
        return tied[0]
    best_sum = min(sum(tally[c]) for c in tied)
    tied = [c for c in tied if sum(tally[c]) == best_sum]
    return min(tied, key=class_names.index)


def _nearest(train_z: np.ndarray, query_z: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices and distances of the k nearest rows, ties by lower index."""
    deltas = train_z - query_z
    distances = np.sqrt(np.einsum("ij,ij->i", deltas, deltas))
    order = np.lexsort((np.arange(len(distances)), distances))[:k]
    return order, distances[order]


def knn_classify(dataset: LabeledDataset, norm: Normalizer, mask: Sequence[int],
                 k: int, query: np.ndarray | FeatureVector) -> KnnResult:
    """Label a query by majority vote over masked, normalised coordinates."""
    if not 1 <= k <= len(dataset):
        raise LearnError(f"k must satisfy 1 <= k <= {len(dataset)}, got {k}")
    mask = _validate_mask(mask, dataset.n_features)
    if isinstance(query, FeatureVector):
        query = query.values
    train_z = normalize(dataset.vectors, norm)[:, mask]
    query_z = normalize(np.asarray(query, dtype=np.float64), norm)[mask]
    idx, dists = _nearest(train_z, query_z, k)
    label = _vote([dataset.labels[i] for i in idx], dists, dataset.class_names)
    return KnnResult(label, dists)


def loo_accuracy(dataset: LabeledDataset, mask: Sequence[int], k: int) -> float:
    """Leave-one-out accuracy with the normalizer fitted once on the full set.

    Refitting per fold would diverge from the deployed model's statistics
    and make SFS quadratically more expensive for no benefit at this
    scale.
    """
    n = len(dataset)
    if n < 2:
        raise LearnError("leave-one-out needs at least 2 items")
    if not 1 <= k <= n - 1:
        raise LearnError(f"k must satisfy 1 <= k <= {n - 1} for leave-one-out, got {k}")
    mask = _validate_mask(mask, dataset.n_features)
    z = normalize(dataset.vectors, norm=fit_normalizer(dataset))[:, mask]
    correct = 0
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        keep[i] = False
        idx, dists = _nearest(z[keep], z[i], k)
        others = np.flatnonzero(keep)
        label = _vote([dataset.labels[others[j]] for j in idx], dists, dataset.class_names)
        keep[i] = True
        if label == dataset.labels[i]:
            correct += 1
    return correct / n


def sfs_select(dataset: LabeledDataset, k: int = 1) -> SelectionResult:
    """Greedy forward selection scored by leave-one-out kNN accuracy.

    Starting from the empty set, each round admits the unselected feature
    whose addition gives the highest LOO accuracy (ties to the lowest
    index). The first round always admits its best feature; later rounds
    stop as soon as the best candidate fails to strictly improve on the
    current accuracy, or when no features remain.
    """
    if len(dataset) < 2:
        raise LearnError("selection needs at least 2 training items")
    if len(set(dataset.labels)) < 2:
        raise LearnError("selection needs at least 2 distinct classes")
    selected: list[int] = []
    trace: list[float] = []
    remaining = list(range(dataset.n_features))
    current = -np.inf
    while remaining:
        scores = [loo_accuracy(dataset, selected + [f], k) for f in remaining]
        best_pos = int(np.argmax(scores))  # argmax keeps the lowest index on ties
        if scores[best_pos] <= current and selected:
            break
        current = scores[best_pos]
        selected.append(remaining.pop(best_pos))
        trace.append(current)
    return SelectionResult(selected, trace)
