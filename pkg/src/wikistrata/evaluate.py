"""Classification harness: stratified folds, nearest-centroid training,
cross-validated evaluation reports.

The classifier is a deterministic nearest-centroid under cosine; it
stands in for a margin-based linear classifier, which can be plugged in
behind the same train/classify interface.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from wikistrata.esa import CONCEPT_SPACE, SparseVector

__all__ = [
    "LabeledCorpus",
    "EvalReport",
    "split_folds",
    "train_centroid",
    "classify",
    "CentroidModel",
    "cross_validate",
]


@dataclass(frozen=True)
class LabeledCorpus:
    """Documents with class labels; at least two classes for evaluation."""

    documents: tuple[tuple[int, tuple[str, ...]], ...]
    labels: dict[int, str]
    classes: tuple[str, ...] = ()

    def __post_init__(self):
        for doc_id, _ in self.documents:
            if doc_id not in self.labels:
                raise ValueError(f"document {doc_id} has no label")
        object.__setattr__(self, "classes", tuple(sorted(set(self.labels.values()))))
        if len(self.classes) < 2:
            raise ValueError("evaluation needs at least 2 classes")

    @property
    def doc_ids(self) -> list[int]:
        return [d for d, _ in self.documents]


def split_folds(corpus: LabeledCorpus, k: int = 10, seed: int = 0) -> list[list[int]]:
    """Stratified k-fold partition of document ids, deterministic under seed."""
    if k < 2:
        raise ValueError("k must be >= 2")
    by_class: dict[str, list[int]] = {}
    for doc_id in corpus.doc_ids:
        by_class.setdefault(corpus.labels[doc_id], []).append(doc_id)
    for cls, ids in sorted(by_class.items()):
        if len(ids) < k:
            raise ValueError(f"class {cls!r} has {len(ids)} documents, fewer than k={k}")
    folds: list[list[int]] = [[] for _ in range(k)]
    rng = random.Random(seed)
    for cls in sorted(by_class):
        ids = sorted(by_class[cls])
        rng.shuffle(ids)
        for i, doc_id in enumerate(ids):
            folds[i % k].append(doc_id)
    return [sorted(f) for f in folds]


@dataclass(frozen=True)
class CentroidModel:
    centroids: dict[str, SparseVector]


def train_centroid(vectors: dict[int, SparseVector], labels: dict[int, str]) -> CentroidModel:
    """Per-class unit-normalized mean of the training vectors."""
    by_class: dict[str, list[SparseVector]] = {}
    for doc_id, vec in sorted(vectors.items()):
        by_class.setdefault(labels[doc_id], []).append(vec)
    centroids = {}
    for cls, vecs in sorted(by_class.items()):
        if not vecs:
            raise ValueError(f"class {cls!r} has no training vectors")
        acc: dict[int, float] = {}
        for v in vecs:
            for d, w in zip(v.dims, v.weights):
                acc[d] = acc.get(d, 0.0) + w
        n = len(vecs)
        mean = SparseVector.from_dict({d: w / n for d, w in acc.items()}, CONCEPT_SPACE)
        centroids[cls] = mean.unit()
    return CentroidModel(centroids=centroids)


def classify(model: CentroidModel, vector: SparseVector) -> str:
    """Argmax cosine against class centroids; ties go to the first class name."""
    best_cls = None
    best_score = None
    for cls in sorted(model.centroids):
        score = model.centroids[cls].cosine(vector)
        if best_score is None or score > best_score:
            best_cls, best_score = cls, score
    return best_cls


@dataclass(frozen=True)
class EvalReport:
    """Cross-validation outcome plus concept-subspace statistics."""

    classes: tuple[str, ...]
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    confusion: tuple[tuple[int, ...], ...]  # rows: true class, cols: predicted
    subspace_dim: int
    per_class_precision: dict[str, float] = field(default_factory=dict)
    per_class_recall: dict[str, float] = field(default_factory=dict)

    def total(self) -> int:
        return sum(sum(row) for row in self.confusion)

    def to_tsv(self) -> str:
        lines = [f"# mean_accuracy\t{self.mean_accuracy:.17g}\n",
                 f"# subspace_dim\t{self.subspace_dim}\n"]
        for i, acc in enumerate(self.fold_accuracies):
            lines.append(f"fold\t{i}\t{acc:.17g}\n")
        lines.append("confusion\ttrue\\pred\t" + "\t".join(self.classes) + "\n")
        for cls, row in zip(self.classes, self.confusion):
            lines.append("confusion\t" + cls + "\t" + "\t".join(map(str, row)) + "\n")
        for cls in self.classes:
            lines.append(
                f"class\t{cls}\t{self.per_class_precision[cls]:.17g}"
                f"\t{self.per_class_recall[cls]:.17g}\n"
            )
        return "".join(lines)

    def summary(self) -> str:
        lines = [
            f"accuracy: {self.mean_accuracy:.4f} over {len(self.fold_accuracies)} folds",
            f"concept-subspace dimension: {self.subspace_dim}",
            "confusion matrix (rows = true):",
        ]
        width = max(len(c) for c in self.classes)
        header = " " * (width + 2) + "  ".join(f"{c:>{width}}" for c in self.classes)
        lines.append(header)
        for cls, row in zip(self.classes, self.confusion):
            lines.append(f"{cls:>{width}}  " + "  ".join(f"{n:>{width}}" for n in row))
        return "\n".join(lines) + "\n"


def cross_validate(
    corpus: LabeledCorpus,
    vectors: dict[int, SparseVector],
    k: int = 10,
    seed: int = 0,
) -> EvalReport:
    """k-fold cross-validation of nearest-centroid over precomputed vectors."""
    folds = split_folds(corpus, k, seed)
    classes = corpus.classes
    cls_index = {c: i for i, c in enumerate(classes)}
    confusion = [[0] * len(classes) for _ in classes]
    fold_accs = []
    for held_out in folds:
        held = set(held_out)
        train_vecs = {d: vectors[d] for d in corpus.doc_ids if d not in held}
        model = train_centroid(train_vecs, corpus.labels)
        correct = 0
        for doc_id in held_out:
            pred = classify(model, vectors[doc_id])
            true = corpus.labels[doc_id]
            confusion[cls_index[true]][cls_index[pred]] += 1
            if pred == true:
                correct += 1
        fold_accs.append(correct / len(held_out))
    dims = set()
    for v in vectors.values():
        dims.update(v.dims)
    precision = {}
    recall = {}
    for i, cls in enumerate(classes):
        col = sum(confusion[j][i] for j in range(len(classes)))
        row = sum(confusion[i])
        precision[cls] = confusion[i][i] / col if col else 0.0
        recall[cls] = confusion[i][i] / row if row else 0.0
    return EvalReport(
        classes=classes,
        fold_accuracies=tuple(fold_accs),
        mean_accuracy=sum(fold_accs) / len(fold_accs),
        confusion=tuple(tuple(row) for row in confusion),
        subspace_dim=len(dims),
        per_class_precision=precision,
        per_class_recall=recall,
    )
