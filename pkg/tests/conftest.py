from __future__ import annotations

import numpy as np
import pytest

from wellbot import corpus, retrieve, textmodel
from wellbot.calibrate import Temperature
from wellbot.dialog import DialogEngine, TopicRoute
from wellbot.gateway import bundle as bundle_mod
from wellbot.ground import load_lexicon


@pytest.fixture(scope="session")
def bundle_dir(tmp_path_factory):
    """One fully built bundle (train + calibrate + index) shared by the suite."""
    path = tmp_path_factory.mktemp("bundle")
    bundle_mod.build_bundle(path)
    return path


@pytest.fixture(scope="session")
def engine(bundle_dir):
    return bundle_mod.load_engine(bundle_dir)


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def medical_corpus():
    return corpus.load_corpus(bundle_mod.default_data_path("medical_qa.jsonl"))


@pytest.fixture(scope="session")
def social_corpus():
    return corpus.load_corpus(bundle_mod.default_data_path("social_qa.jsonl"))


@pytest.fixture(scope="session")
def news_corpus():
    return corpus.load_corpus(bundle_mod.default_data_path("news_qa.jsonl"))


def _mini_route(questions: list[tuple[str, str]], answers: list[tuple[str, str, str]]):
    """Train a tiny topic route from (question, topic) pairs and an answer bank."""
    texts = [q for q, _ in questions]
    labels = [t for _, t in questions]
    featurizer = textmodel.fit_featurizer(texts)
    features = textmodel.encode_matrix(featurizer, texts)
    classifier = textmodel.train_classifier(
        features, labels, textmodel.TrainConfig(epochs=200, seed=1)
    )
    bank = [corpus.LabeledSentence(text=s, topic=t, entry_id=e) for s, t, e in answers]
    return TopicRoute(
        featurizer=featurizer,
        classifier=classifier,
        temperature=Temperature(1.0),
        index=retrieve.build_index(bank),
    )


def make_synthetic_engine(social_has_overlap: bool, threshold: float = 0.9) -> DialogEngine:
    """Engine over disjoint synthetic vocabularies to drive the failure cascade.

    The probe utterance "alpha one please" routes medical and classifies topic
    T1, whose sentences share no token with it, so medical retrieval is empty.
    With ``social_has_overlap`` the social bank answers the takeover query;
    otherwise the cascade falls through to the chat fallback.
    """
    mode_texts = [
        ("alpha one please", "medical"),
        ("alpha two please", "medical"),
        ("alpha one again", "medical"),
        ("bravo one please", "social"),
        ("bravo two please", "social"),
        ("bravo one again", "social"),
    ]
    mode_featurizer = textmodel.fit_featurizer([t for t, _ in mode_texts])
    mode_features = textmodel.encode_matrix(mode_featurizer, [t for t, _ in mode_texts])
    mode_classifier = textmodel.train_classifier(
        mode_features, [l for _, l in mode_texts], textmodel.TrainConfig(epochs=200, seed=1)
    )
    medical = _mini_route(
        questions=[
            ("alpha one please", "T1"),
            ("alpha one again", "T1"),
            ("alpha two please", "T2"),
            ("alpha two again", "T2"),
        ],
        answers=[
            ("Gamma delta.", "T1", "m1"),
            ("Delta gamma epsilon.", "T1", "m2"),
            ("Zeta eta.", "T2", "m3"),
        ],
    )
    social_answer = "One echo foxtrot." if social_has_overlap else "Echo foxtrot."
    social = _mini_route(
        questions=[
            ("bravo one please", "S1"),
            ("bravo one again", "S1"),
            ("bravo two please", "S2"),
            ("bravo two again", "S2"),
        ],
        answers=[
            (social_answer, "S1", "s1"),
            ("Foxtrot golf hotel.", "S2", "s2"),
        ],
    )
    return DialogEngine(
        mode_featurizer=mode_featurizer,
        mode_classifier=mode_classifier,
        medical=medical,
        social=social,
        lexicon=load_lexicon(),
        threshold=threshold,
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
