"""Text encoding and linear classification heads.

The same stack backs the binary mode router and the per-mode topic
classifiers: a tf-idf featurizer (the pluggable stand-in for a heavyweight
sentence encoder) feeding a softmax linear layer trained by full-batch
gradient descent on cross-entropy.  Everything here is deterministic for a
fixed seed so trained model files are byte-reproducible.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters; 1-char tokens kept."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Featurizer:
    """tf-idf vocabulary with smoothed idf weights, fitted once on training text."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    min_df: int

    @property
    def dim(self) -> int:
        return len(self.vocabulary)


@dataclass(frozen=True)
class LinearClassifier:
    weights: np.ndarray  # [num_classes, num_features]
    bias: np.ndarray  # [num_classes]
    labels: tuple[str, ...]


@dataclass(frozen=True)
class Logits:
    values: np.ndarray
    labels: tuple[str, ...]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs <= 0:
            raise ValueError("epochs must be a positive integer")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")


def fit_featurizer(texts: list[str], min_df: int = 1) -> Featurizer:
    """Build the vocabulary of tokens appearing in at least ``min_df`` documents.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, the smoothed form that stays
    finite and non-negative even for tokens present in every document.
    """
    if not texts:
        raise ValueError("cannot fit a featurizer on an empty text list")
    df: dict[str, int] = {}
    for text in texts:
        for token in set(tokenize(text)):
            df[token] = df.get(token, 0) + 1
    kept = sorted(token for token, count in df.items() if count >= min_df)
    vocabulary = {token: index for index, token in enumerate(kept)}
    n_docs = len(texts)
    idf = np.array(
        [math.log((1 + n_docs) / (1 + df[token])) + 1.0 for token in kept], dtype=np.float64
    )
    return Featurizer(vocabulary=vocabulary, idf=idf, min_df=min_df)


def encode(featurizer: Featurizer, text: str) -> np.ndarray:
    """tf x idf vector, L2-normalized; out-of-vocabulary tokens are ignored."""
    vector = np.zeros(featurizer.dim, dtype=np.float64)
    for token in tokenize(text):
        index = featurizer.vocabulary.get(token)
        if index is not None:
            vector[index] += 1.0
    vector *= featurizer.idf
    norm = np.linalg.norm(vector)
    if norm > 0:
        vector /= norm
    return vector


def encode_matrix(featurizer: Featurizer, texts: list[str]) -> np.ndarray:
    return np.stack([encode(featurizer, text) for text in texts])


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def loss_and_gradient(
    weights: np.ndarray,
    bias: np.ndarray,
    features: np.ndarray,
    label_indices: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy + (l2/2)*||W||^2 and its analytic gradient."""
    m = features.shape[0]
    probs = _softmax_rows(features @ weights.T + bias)
    gold = probs[np.arange(m), label_indices]
    loss = float(-np.mean(np.log(np.clip(gold, 1e-300, None))) + 0.5 * l2 * np.sum(weights**2))
    delta = probs
    delta[np.arange(m), label_indices] -= 1.0
    delta /= m
    grad_w = delta.T @ features + l2 * weights
    grad_b = delta.sum(axis=0)
    return loss, grad_w, grad_b


def train_classifier(
    features: np.ndarray, labels: list[str], config: TrainConfig = TrainConfig()
) -> LinearClassifier:
    """Full-batch gradient descent with a fixed learning rate.

    Deterministic given (features, labels, config); the seed controls only
    the small Gaussian weight initialization.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != len(labels):
        raise ValueError("features must be a 2-D matrix with one row per label")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError("training requires at least 2 distinct labels")
    class_index = {label: index for index, label in enumerate(classes)}
    label_indices = np.array([class_index[label] for label in labels], dtype=np.int64)

    rng = np.random.default_rng(config.seed)
    weights = rng.normal(0.0, 0.01, size=(len(classes), features.shape[1]))
    bias = np.zeros(len(classes), dtype=np.float64)
    for _ in range(config.epochs):
        _, grad_w, grad_b = loss_and_gradient(weights, bias, features, label_indices, config.l2)
        weights -= config.learning_rate * grad_w
        bias -= config.learning_rate * grad_b
    return LinearClassifier(weights=weights, bias=bias, labels=classes)


def predict_logits(classifier: LinearClassifier, featurizer: Featurizer, text: str) -> Logits:
    """z = W * encode(text) + b with labels attached in classifier order."""
    vector = encode(featurizer, text)
    return Logits(values=classifier.weights @ vector + classifier.bias, labels=classifier.labels)


def predict_label(classifier: LinearClassifier, featurizer: Featurizer, text: str) -> str:
    logits = predict_logits(classifier, featurizer, text)
    return logits.labels[int(np.argmax(logits.values))]


def evaluate_accuracy(
    classifier: LinearClassifier, featurizer: Featurizer, dataset: list[tuple[str, str]]
) -> float:
    """Fraction of examples whose argmax label (ties to the lower index) is gold."""
    if not dataset:
        raise ValueError("cannot evaluate on an empty dataset")
    correct = sum(
        1 for text, gold in dataset if predict_label(classifier, featurizer, text) == gold
    )
    return correct / len(dataset)


def save_model(
    path: str | Path,
    featurizer: Featurizer,
    classifier: LinearClassifier,
    config: TrainConfig,
) -> None:
    """Persist featurizer + classifier + training config as one JSON document."""
    document = {
        "featurizer": {
            "vocabulary": featurizer.vocabulary,
            "idf": featurizer.idf.tolist(),
            "min_df": featurizer.min_df,
        },
        "weights": classifier.weights.tolist(),
        "bias": classifier.bias.tolist(),
        "labels": list(classifier.labels),
        "config": {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "l2": config.l2,
            "seed": config.seed,
        },
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> tuple[Featurizer, LinearClassifier, TrainConfig]:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    featurizer = Featurizer(
        vocabulary={token: int(index) for token, index in document["featurizer"]["vocabulary"].items()},
        idf=np.array(document["featurizer"]["idf"], dtype=np.float64),
        min_df=int(document["featurizer"]["min_df"]),
    )
    classifier = LinearClassifier(
        weights=np.array(document["weights"], dtype=np.float64),
        bias=np.array(document["bias"], dtype=np.float64),
        labels=tuple(document["labels"]),
    )
    config = TrainConfig(**document["config"])
    return featurizer, classifier, config
