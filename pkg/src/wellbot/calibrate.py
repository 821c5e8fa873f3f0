"""Temperature-scaling calibration and the direct-answer-vs-confirm gate.

Dividing logits by a scalar temperature fitted on validation log-likelihood
never changes which class wins, only how confident the posterior looks.  The
gate then compares the calibrated top probability against a threshold to
decide whether to answer outright or put the user in the loop with a topic
confirmation question.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .textmodel import Logits

GRID_LOW = 0.05
GRID_HIGH = 20.0
GRID_POINTS = 200
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

MAX_CONFIRM_CANDIDATES = 4
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class Temperature:
    value: float

    def __post_init__(self) -> None:
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError(f"temperature must be positive and finite, got {self.value}")


@dataclass(frozen=True)
class CalibratedPrediction:
    probs: np.ndarray
    labels: tuple[str, ...]
    ranked: tuple[int, ...]  # label indices, descending probability, ties to lower index

    @property
    def top_confidence(self) -> float:
        return float(self.probs[self.ranked[0]])

    @property
    def top_label(self) -> str:
        return self.labels[self.ranked[0]]


class GateKind(enum.Enum):
    DIRECT = "direct"
    CONFIRM = "confirm"


@dataclass(frozen=True)
class GateDecision:
    kind: GateKind
    topic: str | None = None  # set for DIRECT
    candidates: tuple[str, ...] = ()  # set for CONFIRM, at most 4, best first


def softmax_with_temperature(logits: Logits, temperature: Temperature) -> CalibratedPrediction:
    """probs_i = exp(z_i/T) / sum_j exp(z_j/T), computed with max-subtraction."""
    z = np.asarray(logits.values, dtype=np.float64) / temperature.value
    z = z - z.max()
    exp = np.exp(z)
    probs = exp / exp.sum()
    ranked = tuple(int(i) for i in np.argsort(-probs, kind="stable"))
    return CalibratedPrediction(probs=probs, labels=logits.labels, ranked=ranked)


def nll(predictions: list[CalibratedPrediction], gold: list[str]) -> float:
    """Mean negative log-likelihood of the gold labels, probabilities floored at 1e-12."""
    if len(predictions) != len(gold):
        raise ValueError("predictions and gold labels must be parallel lists")
    if not predictions:
        raise ValueError("cannot compute nll on an empty set")
    total = 0.0
    for prediction, label in zip(predictions, gold):
        try:
            index = prediction.labels.index(label)
        except ValueError as exc:
            raise ValueError(f"gold label {label!r} absent from prediction labels") from exc
        total -= math.log(max(float(prediction.probs[index]), PROB_FLOOR))
    return total / len(predictions)


def _nll_at(logit_matrix: np.ndarray, gold_indices: np.ndarray, temperature: float) -> float:
    z = logit_matrix / temperature
    z = z - z.max(axis=1, keepdims=True)
    exp = np.exp(z)
    probs = exp / exp.sum(axis=1, keepdims=True)
    gold = np.clip(probs[np.arange(len(gold_indices)), gold_indices], PROB_FLOOR, None)
    return float(-np.mean(np.log(gold)))


def fit_temperature(logits_set: list[Logits], gold: list[str]) -> Temperature:
    """Minimize validation NLL over a log-spaced grid, then refine by golden section.

    The returned temperature never does worse than T = 1 on the same set.
    """
    if not logits_set:
        raise ValueError("cannot fit a temperature on an empty validation set")
    if len(logits_set) != len(gold):
        raise ValueError("logits and gold labels must be parallel lists")
    labels = logits_set[0].labels
    matrix = np.stack([np.asarray(item.values, dtype=np.float64) for item in logits_set])
    gold_indices = np.array([labels.index(label) for label in gold], dtype=np.int64)

    grid = np.logspace(math.log10(GRID_LOW), math.log10(GRID_HIGH), GRID_POINTS)
    values = [_nll_at(matrix, gold_indices, t) for t in grid]
    best = int(np.argmin(values))

    # Golden-section refinement inside the bracket around the best grid point.
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, GRID_POINTS - 1)]
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _nll_at(matrix, gold_indices, c)
    fd = _nll_at(matrix, gold_indices, d)
    while (b - a) > 1e-4:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _nll_at(matrix, gold_indices, c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _nll_at(matrix, gold_indices, d)
    refined = (a + b) / 2.0
    best_t = min((grid[best], refined), key=lambda t: _nll_at(matrix, gold_indices, t))
    if _nll_at(matrix, gold_indices, 1.0) < _nll_at(matrix, gold_indices, best_t):
        best_t = 1.0
    return Temperature(float(best_t))


def gate(prediction: CalibratedPrediction, threshold: float) -> GateDecision:
    """Direct answer when the calibrated top probability clears the threshold,
    otherwise a confirmation over at most 4 ranked candidates."""
    if not (0 < threshold <= 1):
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    if prediction.top_confidence > threshold:
        return GateDecision(kind=GateKind.DIRECT, topic=prediction.top_label)
    count = min(MAX_CONFIRM_CANDIDATES, len(prediction.labels))
    candidates = tuple(prediction.labels[i] for i in prediction.ranked[:count])
    return GateDecision(kind=GateKind.CONFIRM, candidates=candidates)
