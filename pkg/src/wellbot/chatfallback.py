"""Last-resort chat: an add-k smoothed n-gram language model plus canned replies.

The n-gram model exists to measure language-model fit (NLL and perplexity) of
in-domain versus out-of-domain text; reply text itself always comes from a
small pool of neutral chitchat templates so the fallback can never produce
medical-sounding advice.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .textmodel import tokenize

START = "<s>"
END = "</s>"
UNK = "<unk>"

DEFAULT_ORDER = 3
DEFAULT_SMOOTHING_K = 0.1
DEFAULT_MIN_COUNT = 2


@dataclass(frozen=True)
class NgramModel:
    n: int
    counts: dict[tuple[str, ...], dict[str, int]]  # context -> next token -> count
    vocab: frozenset[str]  # includes START, END, UNK
    smoothing_k: float

    def context_total(self, context: tuple[str, ...]) -> int:
        return sum(self.counts.get(context, {}).values())


@dataclass(frozen=True)
class LmEval:
    nll: float  # mean negative log likelihood per token, natural log
    ppl: float  # exp(nll)


def _map_token(token: str, vocab: frozenset[str]) -> str:
    return token if token in vocab else UNK


def train_ngram(
    texts: list[str],
    n: int = DEFAULT_ORDER,
    smoothing_k: float = DEFAULT_SMOOTHING_K,
    min_count: int = DEFAULT_MIN_COUNT,
) -> NgramModel:
    """Count padded n-grams; tokens seen fewer than ``min_count`` times become UNK."""
    if not texts:
        raise ValueError("cannot train a language model on an empty corpus")
    if n < 1:
        raise ValueError(f"order must be at least 1, got {n}")
    if smoothing_k <= 0:
        raise ValueError(f"smoothing_k must be positive, got {smoothing_k}")
    frequencies = Counter(token for text in texts for token in tokenize(text))
    kept = {token for token, count in frequencies.items() if count >= min_count}
    vocab = frozenset(kept | {START, END, UNK})
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    for text in texts:
        tokens = [_map_token(t, vocab) for t in tokenize(text)]
        sequence = [START] * (n - 1) + tokens + [END]
        for i in range(n - 1, len(sequence)):
            context = tuple(sequence[i - n + 1 : i])
            bucket = counts.setdefault(context, {})
            bucket[sequence[i]] = bucket.get(sequence[i], 0) + 1
    return NgramModel(n=n, counts=counts, vocab=vocab, smoothing_k=smoothing_k)


def sequence_prob(model: NgramModel, text: str) -> list[float]:
    """Per-token probabilities p(t | context) = (count + k) / (total + k*|V|).

    The end-of-sequence marker is predicted too; unseen contexts give the
    exactly uniform 1/|V|.
    """
    tokens = [_map_token(t, model.vocab) for t in tokenize(text)]
    sequence = [START] * (model.n - 1) + tokens + [END]
    k = model.smoothing_k
    v = len(model.vocab)
    probs: list[float] = []
    for i in range(model.n - 1, len(sequence)):
        context = tuple(sequence[i - model.n + 1 : i])
        bucket = model.counts.get(context, {})
        total = sum(bucket.values())
        count = bucket.get(sequence[i], 0)
        probs.append((count + k) / (total + k * v))
    return probs


def evaluate_lm(model: NgramModel, texts: list[str]) -> LmEval:
    """Mean per-token NLL over every token of every text; ppl = exp(nll)."""
    if not texts:
        raise ValueError("cannot evaluate on an empty text list")
    log_sum = 0.0
    n_tokens = 0
    for text in texts:
        for p in sequence_prob(model, text):
            log_sum -= math.log(p)
            n_tokens += 1
    nll = log_sum / n_tokens
    return LmEval(nll=nll, ppl=math.exp(nll))


def save_ngram(path: str | Path, model: NgramModel) -> None:
    document = {
        "n": model.n,
        "smoothing_k": model.smoothing_k,
        "vocab": sorted(model.vocab),
        "counts": {"\x1f".join(ctx): bucket for ctx, bucket in sorted(model.counts.items())},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True), encoding="utf-8")


def load_ngram(path: str | Path) -> NgramModel:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    counts = {
        tuple(key.split("\x1f")) if key else (): bucket
        for key, bucket in document["counts"].items()
    }
    return NgramModel(
        n=int(document["n"]),
        counts=counts,
        vocab=frozenset(document["vocab"]),
        smoothing_k=float(document["smoothing_k"]),
    )


def _load_templates() -> list[str]:
    text = resources.files("wellbot").joinpath("data/chat_templates.json").read_text("utf-8")
    return json.loads(text)


_TEMPLATES: list[str] | None = None


def generic_reply(utterance: str, seed: int = 0) -> str:
    """Deterministic neutral reply keyed by a stable hash of (utterance, seed)."""
    global _TEMPLATES
    if _TEMPLATES is None:
        _TEMPLATES = _load_templates()
    digest = hashlib.sha256(f"{seed}\x00{utterance}".encode("utf-8")).digest()
    index = int.from_bytes(digest[:8], "big") % len(_TEMPLATES)
    return _TEMPLATES[index]
