"""Knowledge-vault data model: JSONL corpora, deterministic splits, sentence segmentation.

A corpus is an ordered list of curated question/answer entries, each labeled
with a topic.  Everything downstream (classifiers, retrieval banks, the dialog
engine) consumes corpora loaded here, so the file format and the segmentation
rules are fixed once and reused everywhere.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

RECORD_FIELDS = ("id", "topic", "question", "answer", "source")

# Periods ending these tokens never close a sentence.
ABBREVIATIONS = frozenset({"dr.", "e.g.", "i.e.", "vs.", "mr.", "ms."})

_TERMINATORS = ".?!"


class CorpusFormatError(ValueError):
    """Raised when a corpus file is missing, malformed, or violates invariants."""


@dataclass(frozen=True)
class QaEntry:
    """One curated question/answer pair with its topic label and provenance tag."""

    id: str
    topic: str
    question: str
    answer: str
    source: str


@dataclass(frozen=True)
class LabeledSentence:
    """A single answer sentence carrying its topic and originating entry id."""

    text: str
    topic: str
    entry_id: str


@dataclass(frozen=True)
class Corpus:
    entries: tuple[QaEntry, ...]

    @property
    def topics(self) -> frozenset[str]:
        return frozenset(entry.topic for entry in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SplitSpec:
    """Ratios plus the seed that fully determines a train/valid/test split."""

    train_ratio: float
    valid_ratio: float
    test_ratio: float
    seed: int = 0

    def __post_init__(self) -> None:
        for ratio in (self.train_ratio, self.valid_ratio, self.test_ratio):
            if ratio < 0:
                raise ValueError(f"split ratios must be non-negative, got {ratio}")
        total = self.train_ratio + self.valid_ratio + self.test_ratio
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {total}")


def load_corpus(path: str | Path) -> Corpus:
    """Read a UTF-8 JSON-lines corpus file, preserving record order.

    Each line must be an object with exactly the fields
    ``id, topic, question, answer, source``; ids must be unique and
    topic/question/answer non-empty after trimming.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusFormatError(f"corpus file not found: {path}")
    entries: list[QaEntry] = []
    seen_ids: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise CorpusFormatError(f"{path}:{lineno}: expected a JSON object")
            missing = [f for f in RECORD_FIELDS if f not in record]
            unknown = [f for f in record if f not in RECORD_FIELDS]
            if missing:
                raise CorpusFormatError(f"{path}:{lineno}: missing fields {missing}")
            if unknown:
                raise CorpusFormatError(f"{path}:{lineno}: unknown fields {unknown}")
            entry = QaEntry(
                id=str(record["id"]),
                topic=str(record["topic"]).strip(),
                question=str(record["question"]).strip(),
                answer=str(record["answer"]).strip(),
                source=str(record["source"]),
            )
            if entry.id in seen_ids:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate id {entry.id!r}")
            if not entry.topic or not entry.question or not entry.answer:
                raise CorpusFormatError(
                    f"{path}:{lineno}: topic, question, and answer must be non-empty"
                )
            seen_ids.add(entry.id)
            entries.append(entry)
    return Corpus(entries=tuple(entries))


def save_corpus(path: str | Path, corpus: Corpus) -> None:
    """Write a corpus back out in the JSON-lines record format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for entry in corpus.entries:
            record = {
                "id": entry.id,
                "topic": entry.topic,
                "question": entry.question,
                "answer": entry.answer,
                "source": entry.source,
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def _trailing_word(text: str, end: int) -> str:
    """The whitespace-delimited token ending at ``end`` (inclusive), leading punctuation stripped."""
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start : end + 1]
    return word.lstrip("([{\"'").lower()


def _is_boundary(text: str, i: int) -> bool:
    if text[i] == "." and _trailing_word(text, i) in ABBREVIATIONS:
        return False
    j = i + 1
    n = len(text)
    if j >= n:
        return True
    if not text[j].isspace():
        # mid-token punctuation such as "3.5" or ellipses
        return False
    while j < n and text[j].isspace():
        j += 1
    if j >= n:
        return True
    return text[j].isupper()


def segment_sentences(text: str) -> list[str]:
    """Split prose into sentences.

    Splits at '.', '?' or '!' followed by whitespace and an uppercase letter
    (or end of text), unless the terminator closes a known abbreviation.
    Joining the segments with single spaces reproduces the
    whitespace-normalized input; no segment is empty.
    """
    segments: list[str] = []
    start = 0
    for i, ch in enumerate(text):
        if ch in _TERMINATORS and _is_boundary(text, i):
            segment = text[start : i + 1].strip()
            if segment:
                segments.append(segment)
            start = i + 1
    tail = text[start:].strip()
    if tail:
        segments.append(tail)
    return segments


def split_corpus(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus, Corpus]:
    """Deterministically partition a corpus into (train, valid, test).

    Valid and test sizes are floored from their ratios; the remainder goes to
    train.  The same (corpus, spec) always yields the identical partition.
    """
    if not corpus.entries:
        raise ValueError("cannot split an empty corpus")
    entries = list(corpus.entries)
    random.Random(spec.seed).shuffle(entries)
    n = len(entries)
    n_valid = int(n * spec.valid_ratio + 1e-9)
    n_test = int(n * spec.test_ratio + 1e-9)
    n_train = n - n_valid - n_test
    train = entries[:n_train]
    valid = entries[n_train : n_train + n_valid]
    test = entries[n_train + n_valid :]
    return Corpus(tuple(train)), Corpus(tuple(valid)), Corpus(tuple(test))


def sentence_bank(corpus: Corpus) -> list[LabeledSentence]:
    """Segment every entry's answer into topic-labeled single sentences."""
    bank: list[LabeledSentence] = []
    for entry in corpus.entries:
        for sentence in segment_sentences(entry.answer):
            bank.append(LabeledSentence(text=sentence, topic=entry.topic, entry_id=entry.id))
    return bank


def save_bank(path: str | Path, bank: list[LabeledSentence]) -> None:
    """Persist a sentence bank as JSON lines of {text, topic, entry_id}."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for sentence in bank:
            handle.write(
                json.dumps(
                    {"text": sentence.text, "topic": sentence.topic, "entry_id": sentence.entry_id},
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_bank(path: str | Path) -> list[LabeledSentence]:
    path = Path(path)
    if not path.exists():
        raise CorpusFormatError(f"sentence bank not found: {path}")
    bank: list[LabeledSentence] = []
    with path.open(encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            bank.append(
                LabeledSentence(
                    text=record["text"], topic=record["topic"], entry_id=record["entry_id"]
                )
            )
    return bank
