"""Topic-restricted ranked sentence retrieval over the sentence bank.

Sentences are indexed once; queries are scored with BM25 against only the
sentences of the predicted topic, and the top hits are concatenated into the
agent's answer.  The topic partition is treated as its own little corpus:
document frequencies, counts, and average length are all computed within the
topic, so activity in other topics can never perturb a topic's ranking.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .corpus import LabeledSentence
from .textmodel import tokenize

BM25_K1 = 1.2
BM25_B = 0.75
DEFAULT_TOP_K = 3


@dataclass(frozen=True)
class SentenceIndex:
    postings: dict[str, list[tuple[int, int]]]  # token -> [(sentence id, term frequency)]
    sentences: dict[int, LabeledSentence]
    doc_lengths: dict[int, int]
    avg_len: float
    by_topic: dict[str, frozenset[int]]
    _topic_avg_len: dict[str, float] = field(default_factory=dict, repr=False)


@dataclass(frozen=True)
class RankedAnswer:
    sentence_ids: tuple[int, ...]
    scores: tuple[float, ...]
    text: str  # top sentences joined by single spaces


@dataclass(frozen=True)
class RetrievalMetrics:
    precision: float
    recall: float
    f1: float
    accuracy: float


def build_index(bank: list[LabeledSentence]) -> SentenceIndex:
    """Index a sentence bank; ids are assigned in bank order."""
    if not bank:
        raise ValueError("cannot index an empty sentence bank")
    postings: dict[str, list[tuple[int, int]]] = {}
    sentences: dict[int, LabeledSentence] = {}
    doc_lengths: dict[int, int] = {}
    topic_ids: dict[str, set[int]] = {}
    for sid, sentence in enumerate(bank):
        tokens = tokenize(sentence.text)
        sentences[sid] = sentence
        doc_lengths[sid] = len(tokens)
        topic_ids.setdefault(sentence.topic, set()).add(sid)
        for token, count in sorted(Counter(tokens).items()):
            postings.setdefault(token, []).append((sid, count))
    avg_len = sum(doc_lengths.values()) / len(doc_lengths)
    by_topic = {topic: frozenset(ids) for topic, ids in topic_ids.items()}
    topic_avg_len = {
        topic: sum(doc_lengths[sid] for sid in ids) / len(ids) for topic, ids in by_topic.items()
    }
    return SentenceIndex(
        postings=postings,
        sentences=sentences,
        doc_lengths=doc_lengths,
        avg_len=avg_len,
        by_topic=by_topic,
        _topic_avg_len=topic_avg_len,
    )


def score_sentences(
    index: SentenceIndex, question: str, topic: str, k: int = DEFAULT_TOP_K
) -> RankedAnswer:
    """BM25-rank the topic's sentences against the question and keep the top k.

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)) with N and df taken within
    the topic partition.  Query tokens are deduplicated.  Ties break toward
    the lower sentence id.  A question sharing no token with the topic yields
    an empty answer, which callers treat as "no information".
    """
    if topic not in index.by_topic:
        raise KeyError(f"unknown topic {topic!r}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    candidate_ids = index.by_topic[topic]
    n_candidates = len(candidate_ids)
    avg_len = index._topic_avg_len[topic]
    scores: dict[int, float] = {}
    for token in sorted(set(tokenize(question))):
        plist = index.postings.get(token)
        if not plist:
            continue
        in_topic = [(sid, tf) for sid, tf in plist if sid in candidate_ids]
        df = len(in_topic)
        if df == 0:
            continue
        idf = math.log(1.0 + (n_candidates - df + 0.5) / (df + 0.5))
        for sid, tf in in_topic:
            norm = BM25_K1 * (1.0 - BM25_B + BM25_B * index.doc_lengths[sid] / avg_len)
            scores[sid] = scores.get(sid, 0.0) + idf * tf * (BM25_K1 + 1.0) / (tf + norm)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))[:k]
    sentence_ids = tuple(sid for sid, _ in ranked)
    return RankedAnswer(
        sentence_ids=sentence_ids,
        scores=tuple(score for _, score in ranked),
        text=" ".join(index.sentences[sid].text for sid in sentence_ids),
    )


def evaluate_retriever(
    index: SentenceIndex,
    test: list[tuple[str, str, str]],
    k: int = DEFAULT_TOP_K,
) -> RetrievalMetrics:
    """Micro-averaged precision/recall/F1 over retrieved-vs-relevant sentences.

    A sentence is relevant when it originates from the example's gold entry.
    Accuracy is the fraction of examples with at least one relevant sentence
    in the top k.
    """
    if not test:
        raise ValueError("cannot evaluate on an empty test set")
    tp = fp = fn = 0
    hits = 0
    for question, gold_topic, gold_entry_id in test:
        relevant = {
            sid for sid, sentence in index.sentences.items() if sentence.entry_id == gold_entry_id
        }
        if gold_topic in index.by_topic:
            retrieved = set(score_sentences(index, question, gold_topic, k).sentence_ids)
        else:
            retrieved = set()
        tp += len(retrieved & relevant)
        fp += len(retrieved - relevant)
        fn += len(relevant - retrieved)
        if retrieved & relevant:
            hits += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return RetrievalMetrics(
        precision=precision, recall=recall, f1=f1, accuracy=hits / len(test)
    )
