"""Engine bundle: the deployable closure of every trained artifact.

A bundle directory holds the mode classifier, both topic classifiers, their
calibration temperatures, the two sentence banks, the chat language model,
the frozen data splits, and a manifest pinning the schema version and the
configuration.  ``train``, ``calibrate``, and ``index`` each write their part;
``serve`` and ``chat`` load the whole thing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .. import calibrate, chatfallback, corpus, ground, retrieve, textmodel
from ..calibrate import Temperature
from ..corpus import Corpus, SplitSpec
from ..dialog import DialogEngine, TopicRoute, TranscriptLog
from ..textmodel import TrainConfig

SCHEMA_VERSION = 1

MODE_MODEL = "mode_model.json"
MEDICAL_MODEL = "medical_topic_model.json"
SOCIAL_MODEL = "social_topic_model.json"
CALIBRATION = "calibration.json"
MEDICAL_BANK = "medical_bank.jsonl"
SOCIAL_BANK = "social_bank.jsonl"
LM_MODEL = "lm.json"
MANIFEST = "manifest.json"
TRAIN_REPORT = "train_report.json"


class BundleError(RuntimeError):
    """Raised for missing bundle files or schema mismatches."""


@dataclass(frozen=True)
class BundleConfig:
    threshold: float = 0.9
    top_k: int = 3
    seed: int = 0
    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 1e-4
    min_df: int = 1
    lm_order: int = 3
    lm_smoothing_k: float = 0.1
    reply_seed: int = 0
    train_ratio: float = 0.8
    valid_ratio: float = 0.1
    test_ratio: float = 0.1

    @property
    def split_spec(self) -> SplitSpec:
        return SplitSpec(self.train_ratio, self.valid_ratio, self.test_ratio, seed=self.seed)

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate, epochs=self.epochs, l2=self.l2, seed=self.seed
        )


def default_data_path(name: str) -> Path:
    """Path of a packaged fixture data file (corpora, lexicon, dialogue text)."""
    return Path(str(resources.files("wellbot").joinpath(f"data/{name}")))


def mode_dataset(medical: Corpus, news: Corpus) -> tuple[list[str], list[str]]:
    """Binary mode-router training pairs: medical questions vs news questions."""
    texts = [entry.question for entry in medical.entries]
    labels = ["medical"] * len(medical.entries)
    texts += [entry.question for entry in news.entries]
    labels += ["social"] * len(news.entries)
    return texts, labels


def _save_split(directory: Path, prefix: str, parts: tuple[Corpus, Corpus, Corpus]) -> None:
    for name, part in zip(("train", "valid", "test"), parts):
        corpus.save_corpus(directory / "splits" / f"{prefix}_{name}.jsonl", part)


def _load_split(directory: Path, prefix: str) -> tuple[Corpus, Corpus, Corpus]:
    parts = []
    for name in ("train", "valid", "test"):
        path = directory / "splits" / f"{prefix}_{name}.jsonl"
        if not path.exists():
            raise BundleError(f"missing split file {path}; run `wellbot train` first")
        parts.append(corpus.load_corpus(path))
    return tuple(parts)


def _train_topic_model(train_part: Corpus, config: BundleConfig):
    # Both question-topic and answer-topic pairs train the topic classifier,
    # so answer vocabulary (disease names, organs) counts as topic evidence.
    texts = [entry.question for entry in train_part.entries]
    texts += [entry.answer for entry in train_part.entries]
    labels = [entry.topic for entry in train_part.entries] * 2
    featurizer = textmodel.fit_featurizer(texts, min_df=config.min_df)
    features = textmodel.encode_matrix(featurizer, texts)
    classifier = textmodel.train_classifier(features, labels, config.train_config)
    return featurizer, classifier


def train_bundle(
    out_dir: str | Path,
    medical_path: str | Path | None = None,
    social_path: str | Path | None = None,
    news_path: str | Path | None = None,
    lm_text_path: str | Path | None = None,
    config: BundleConfig = BundleConfig(),
) -> dict:
    """Train every model, freeze the splits, and write the bundle skeleton.

    Returns the training report (also written to train_report.json).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    medical = corpus.load_corpus(medical_path or default_data_path("medical_qa.jsonl"))
    social = corpus.load_corpus(social_path or default_data_path("social_qa.jsonl"))
    news = corpus.load_corpus(news_path or default_data_path("news_qa.jsonl"))

    spec = config.split_spec
    med_parts = corpus.split_corpus(medical, spec)
    soc_parts = corpus.split_corpus(social, spec)
    news_parts = corpus.split_corpus(news, spec)
    _save_split(out, "medical", med_parts)
    _save_split(out, "social", soc_parts)
    _save_split(out, "news", news_parts)

    # Mode router: medical questions vs news questions, per-split.
    mode_texts, mode_labels = mode_dataset(med_parts[0], news_parts[0])
    mode_featurizer = textmodel.fit_featurizer(mode_texts, min_df=config.min_df)
    mode_features = textmodel.encode_matrix(mode_featurizer, mode_texts)
    mode_classifier = textmodel.train_classifier(mode_features, mode_labels, config.train_config)
    textmodel.save_model(out / MODE_MODEL, mode_featurizer, mode_classifier, config.train_config)

    med_featurizer, med_classifier = _train_topic_model(med_parts[0], config)
    textmodel.save_model(out / MEDICAL_MODEL, med_featurizer, med_classifier, config.train_config)
    soc_featurizer, soc_classifier = _train_topic_model(soc_parts[0], config)
    textmodel.save_model(out / SOCIAL_MODEL, soc_featurizer, soc_classifier, config.train_config)

    lm_path = Path(lm_text_path or default_data_path("dialogue_lm.txt"))
    lm_lines = [line for line in lm_path.read_text(encoding="utf-8").splitlines() if line.strip()]
    lm = chatfallback.train_ngram(lm_lines, n=config.lm_order, smoothing_k=config.lm_smoothing_k)
    chatfallback.save_ngram(out / LM_MODEL, lm)

    manifest = {"schema_version": SCHEMA_VERSION, "config": asdict(config)}
    (out / MANIFEST).write_text(json.dumps(manifest, sort_keys=True, indent=2), encoding="utf-8")

    report = {
        "mode": {
            "train_size": len(mode_texts),
            "train_accuracy": textmodel.evaluate_accuracy(
                mode_classifier, mode_featurizer, list(zip(mode_texts, mode_labels))
            ),
            "test_accuracy": textmodel.evaluate_accuracy(
                mode_classifier,
                mode_featurizer,
                [(t, l) for t, l in zip(*mode_dataset(med_parts[2], news_parts[2]))],
            ),
        },
        "medical_topics": _topic_report(med_featurizer, med_classifier, med_parts),
        "social_topics": _topic_report(soc_featurizer, soc_classifier, soc_parts),
        "lm": {"order": config.lm_order, "vocab_size": len(lm.vocab)},
    }
    (out / TRAIN_REPORT).write_text(json.dumps(report, sort_keys=True, indent=2), encoding="utf-8")
    return report


def _topic_report(featurizer, classifier, parts: tuple[Corpus, Corpus, Corpus]) -> dict:
    def pairs(part: Corpus):
        return [(entry.question, entry.topic) for entry in part.entries]

    return {
        "labels": list(classifier.labels),
        "train_size": len(parts[0].entries),
        "train_accuracy": textmodel.evaluate_accuracy(classifier, featurizer, pairs(parts[0])),
        "test_accuracy": textmodel.evaluate_accuracy(classifier, featurizer, pairs(parts[2])),
    }


def calibrate_bundle(bundle_dir: str | Path) -> dict:
    """Fit a temperature per topic classifier on its frozen validation split."""
    out = Path(bundle_dir)
    report: dict = {}
    for prefix, model_file in (("medical", MEDICAL_MODEL), ("social", SOCIAL_MODEL)):
        featurizer, classifier, _ = _load_model(out / model_file)
        _, valid, _ = _load_split(out, prefix)
        logits_set = [
            textmodel.predict_logits(classifier, featurizer, entry.question)
            for entry in valid.entries
        ]
        gold = [entry.topic for entry in valid.entries]
        nll_before = calibrate.nll(
            [calibrate.softmax_with_temperature(l, Temperature(1.0)) for l in logits_set], gold
        )
        temperature = calibrate.fit_temperature(logits_set, gold)
        nll_after = calibrate.nll(
            [calibrate.softmax_with_temperature(l, temperature) for l in logits_set], gold
        )
        accuracy = textmodel.evaluate_accuracy(
            classifier, featurizer, [(entry.question, entry.topic) for entry in valid.entries]
        )
        report[prefix] = {
            "T": temperature.value,
            "nll_before": nll_before,
            "nll_after": nll_after,
            "accuracy": accuracy,
        }
    (out / CALIBRATION).write_text(json.dumps(report, sort_keys=True, indent=2), encoding="utf-8")
    return report


def index_bundle(bundle_dir: str | Path) -> dict:
    """Segment both corpora into sentence banks and persist them."""
    out = Path(bundle_dir)
    sizes = {}
    for prefix, bank_file in (("medical", MEDICAL_BANK), ("social", SOCIAL_BANK)):
        parts = _load_split(out, prefix)
        full = Corpus(tuple(e for part in parts for e in part.entries))
        bank = corpus.sentence_bank(full)
        corpus.save_bank(out / bank_file, bank)
        sizes[prefix] = len(bank)
    return sizes


def _load_model(path: Path):
    if not path.exists():
        raise BundleError(f"missing model file {path}; run `wellbot train` first")
    return textmodel.load_model(path)


def load_manifest(bundle_dir: str | Path) -> BundleConfig:
    path = Path(bundle_dir) / MANIFEST
    if not path.exists():
        raise BundleError(f"missing manifest {path}; run `wellbot train` first")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise BundleError(
            f"bundle schema version {manifest.get('schema_version')!r} does not match "
            f"engine schema {SCHEMA_VERSION}"
        )
    return BundleConfig(**manifest["config"])


def load_engine(
    bundle_dir: str | Path,
    lexicon_path: str | Path | None = None,
    log_path: str | Path | None = None,
) -> DialogEngine:
    """Assemble a DialogEngine from a complete bundle directory."""
    out = Path(bundle_dir)
    config = load_manifest(out)
    calibration_path = out / CALIBRATION
    if not calibration_path.exists():
        raise BundleError(f"missing {calibration_path}; run `wellbot calibrate` first")
    calibration = json.loads(calibration_path.read_text(encoding="utf-8"))

    mode_featurizer, mode_classifier, _ = _load_model(out / MODE_MODEL)
    routes = {}
    for prefix, model_file, bank_file in (
        ("medical", MEDICAL_MODEL, MEDICAL_BANK),
        ("social", SOCIAL_MODEL, SOCIAL_BANK),
    ):
        featurizer, classifier, _ = _load_model(out / model_file)
        bank_path = out / bank_file
        if not bank_path.exists():
            raise BundleError(f"missing {bank_path}; run `wellbot index` first")
        bank = corpus.load_bank(bank_path)
        routes[prefix] = TopicRoute(
            featurizer=featurizer,
            classifier=classifier,
            temperature=Temperature(calibration[prefix]["T"]),
            index=retrieve.build_index(bank),
        )
    lexicon = ground.load_lexicon(lexicon_path)
    return DialogEngine(
        mode_featurizer=mode_featurizer,
        mode_classifier=mode_classifier,
        medical=routes["medical"],
        social=routes["social"],
        lexicon=lexicon,
        threshold=config.threshold,
        top_k=config.top_k,
        reply_seed=config.reply_seed,
        transcript_log=TranscriptLog(log_path) if log_path else None,
    )


def build_bundle(
    out_dir: str | Path,
    config: BundleConfig = BundleConfig(),
    **corpus_paths,
) -> dict:
    """Convenience: train + calibrate + index in one call; returns the reports."""
    report = {"train": train_bundle(out_dir, config=config, **corpus_paths)}
    report["calibration"] = calibrate_bundle(out_dir)
    report["index"] = index_bundle(out_dir)
    return report
