"""Acceptance suite: one test per release criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Every tolerance and runtime budget is pinned here.
"""

from __future__ import annotations

import json
import math
import random
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from wellbot import calibrate, chatfallback, corpus, ground, retrieve, textmodel
from wellbot.calibrate import Temperature
from wellbot.dialog import DialogState, Mode, ResponseKind, new_session
from wellbot.gateway import bundle as bundle_mod
from wellbot.gateway.app import create_app
from wellbot.ground import PointEvent, Side
from wellbot.textmodel import Logits

from conftest import make_synthetic_engine
from test_retrieve import brute_force_bm25


def _report(name: str, detail: str) -> None:
    print(f"\nACCEPTANCE PASS {name}: {detail}")


class Stopwatch:
    def __init__(self, budget_seconds: float):
        self.budget = budget_seconds
        self.start = time.monotonic()

    def check(self) -> float:
        elapsed = time.monotonic() - self.start
        assert elapsed < self.budget, f"runtime {elapsed:.2f}s exceeded {self.budget}s budget"
        return elapsed


class TestCalibrationSuite:
    def test_calibration_criterion(self, bundle_dir):
        watch = Stopwatch(5.0)
        rng = np.random.default_rng(7)
        temperatures = np.logspace(math.log10(0.05), math.log10(20.0), 20)
        for _ in range(200):
            values = rng.normal(0, 3, size=rng.integers(2, 9))
            logits = Logits(values=values, labels=tuple(f"c{i}" for i in range(len(values))))
            tops, maxima = [], []
            for t in temperatures:
                prediction = calibrate.softmax_with_temperature(logits, Temperature(float(t)))
                assert prediction.probs.sum() == pytest.approx(1.0, abs=1e-9)
                tops.append(prediction.ranked[0])
                maxima.append(prediction.probs.max())
            assert len(set(tops)) == 1, "argmax must be invariant under temperature"
            for low_t, high_t in zip(maxima, maxima[1:]):
                assert high_t <= low_t + 1e-12, "max prob must flatten as T grows"

        # Eq.-1 contract on the fixture validation logits.
        report = json.loads((bundle_dir / bundle_mod.CALIBRATION).read_text())
        for which in ("medical", "social"):
            assert report[which]["nll_after"] <= report[which]["nll_before"]
        elapsed = watch.check()
        _report(
            "calibration",
            f"200 logit vectors x 20 temperatures; nll_after<=nll_before for both "
            f"topic classifiers; {elapsed:.2f}s < 5s",
        )


class TestClassifierSuite:
    def test_classifier_criterion(self, bundle_dir):
        watch = Stopwatch(30.0)
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(5):
            m, dim, classes = 10, 5, 3
            features = rng.normal(size=(m, dim))
            label_indices = rng.integers(0, classes, size=m)
            weights = rng.normal(size=(classes, dim))
            bias = rng.normal(size=classes)
            l2 = 0.02
            _, grad_w, grad_b = textmodel.loss_and_gradient(
                weights, bias, features, label_indices, l2
            )

            def objective(w, b):
                z = features @ w.T + b
                z = z - z.max(axis=1, keepdims=True)
                log_probs = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
                data = -log_probs[np.arange(m), label_indices].mean()
                return data + 0.5 * l2 * np.sum(w * w)

            eps = 1e-6
            for index in np.ndindex(weights.shape):
                up, down = weights.copy(), weights.copy()
                up[index] += eps
                down[index] -= eps
                numeric = (objective(up, bias) - objective(down, bias)) / (2 * eps)
                worst = max(worst, abs(numeric - grad_w[index]))
            for i in range(classes):
                up, down = bias.copy(), bias.copy()
                up[i] += eps
                down[i] -= eps
                numeric = (objective(weights, up) - objective(weights, down)) / (2 * eps)
                worst = max(worst, abs(numeric - grad_b[i]))
        assert worst < 1e-4, f"gradient error {worst} exceeds 1e-4"

        featurizer, classifier, _ = textmodel.load_model(bundle_dir / bundle_mod.MODE_MODEL)
        med_test = bundle_mod._load_split(bundle_dir, "medical")[2]
        news_test = bundle_mod._load_split(bundle_dir, "news")[2]
        texts, labels = bundle_mod.mode_dataset(med_test, news_test)
        accuracy = textmodel.evaluate_accuracy(classifier, featurizer, list(zip(texts, labels)))
        assert accuracy >= 0.95, f"mode test accuracy {accuracy} below 0.95"
        elapsed = watch.check()
        _report(
            "classifier",
            f"max gradient error {worst:.2e} < 1e-4; mode test accuracy {accuracy:.4f} >= 0.95 "
            f"on {len(texts)} cleanly separated medical/news questions (optimistic by "
            f"construction, as real utterances blur the domains); {elapsed:.2f}s < 30s",
        )


class TestRetrieverSuite:
    def test_retriever_criterion(self, medical_corpus, social_corpus):
        watch = Stopwatch(10.0)
        rng = random.Random(13)
        # Brute-force BM25 oracle equivalence on banks of <= 50 sentences.
        checked = 0
        for _ in range(25):
            vocab = [f"w{i}" for i in range(25)]
            bank = [
                corpus.LabeledSentence(
                    text=" ".join(rng.choices(vocab, k=rng.randint(1, 10))) + ".",
                    topic=f"T{rng.randrange(3)}",
                    entry_id=f"e{i}",
                )
                for i in range(rng.randint(2, 50))
            ]
            index = retrieve.build_index(bank)
            topic = rng.choice(sorted(index.by_topic))
            question = " ".join(rng.choices(vocab, k=rng.randint(1, 5)))
            answer = retrieve.score_sentences(index, question, topic, 5)
            expected_ids, expected_scores = brute_force_bm25(bank, question, topic, 5)
            assert list(answer.sentence_ids) == expected_ids
            assert answer.scores == pytest.approx(expected_scores, rel=1e-9)
            checked += 1

        # Topic confinement across 1000 random queries on the fixture index.
        full_bank = corpus.sentence_bank(medical_corpus) + corpus.sentence_bank(social_corpus)
        index = retrieve.build_index(full_bank)
        tokens = sorted(index.postings)
        topics = sorted(index.by_topic)
        for _ in range(1000):
            topic = rng.choice(topics)
            question = " ".join(rng.choices(tokens, k=rng.randint(1, 6)))
            result = retrieve.score_sentences(index, question, topic, 3)
            assert all(sid in index.by_topic[topic] for sid in result.sentence_ids)

        # Self-retrieval rank-1 for every fixture entry.
        hits = 0
        for fixture in (medical_corpus, social_corpus):
            fixture_index = retrieve.build_index(corpus.sentence_bank(fixture))
            for entry in fixture.entries:
                ranked = retrieve.score_sentences(fixture_index, entry.question, entry.topic, 3)
                assert ranked.sentence_ids, entry.id
                top = fixture_index.sentences[ranked.sentence_ids[0]]
                assert top.entry_id == entry.id, (
                    f"{entry.id} self-retrieval lost to {top.entry_id}"
                )
                hits += 1
        elapsed = watch.check()
        _report(
            "retriever",
            f"{checked} brute-force oracle banks matched; 1000 queries topic-confined; "
            f"self-retrieval rank-1 for all {hits} fixture entries; {elapsed:.2f}s < 10s",
        )


class TestLmSuite:
    def test_lm_criterion(self):
        watch = Stopwatch(10.0)
        lines = [
            line
            for line in bundle_mod.default_data_path("dialogue_lm.txt")
            .read_text(encoding="utf-8")
            .splitlines()
            if line.strip()
        ]
        model = chatfallback.train_ngram(lines, n=3)
        evaluation = chatfallback.evaluate_lm(model, lines[:12])
        assert evaluation.ppl == math.exp(evaluation.nll), "ppl must equal exp(nll) exactly"

        vocab = frozenset({chatfallback.START, chatfallback.END, chatfallback.UNK, "a", "b", "c"})
        uniform = chatfallback.NgramModel(n=2, counts={}, vocab=vocab, smoothing_k=0.4)
        uniform_eval = chatfallback.evaluate_lm(uniform, ["a b c", "c b"])
        assert uniform_eval.ppl == pytest.approx(len(vocab), rel=1e-9)

        cut = int(len(lines) * 0.8)
        held_out = lines[cut:]
        in_domain = chatfallback.train_ngram(lines[:cut], n=3, min_count=1)
        news_records = [
            json.loads(line)
            for line in bundle_mod.default_data_path("news_qa.jsonl")
            .read_text(encoding="utf-8")
            .splitlines()
            if line.strip()
        ]
        news_text = [r["question"] for r in news_records] + [r["answer"] for r in news_records]
        out_of_domain = chatfallback.train_ngram(news_text, n=3, min_count=1)
        ppl_in = chatfallback.evaluate_lm(in_domain, held_out).ppl
        ppl_out = chatfallback.evaluate_lm(out_of_domain, held_out).ppl
        assert ppl_in < ppl_out, "in-domain model must beat out-of-domain on held-out dialogue"
        elapsed = watch.check()
        _report(
            "lm",
            f"ppl==exp(nll) exact; uniform ppl == |V| = {len(vocab)}; in-domain ppl "
            f"{ppl_in:.2f} < out-of-domain ppl {ppl_out:.2f}; {elapsed:.2f}s < 10s",
        )


class TestDialogSuite:
    def test_dialog_criterion(self, engine):
        watch = Stopwatch(20.0)

        # (a) direct high-confidence answer with the liver highlighted.
        session = new_session()
        answer = engine.handle_utterance(session, "What is cirrhosis?")
        assert answer.kind is ResponseKind.ANSWER
        assert answer.mode_used is Mode.MEDICAL
        assert answer.topic == "Liver Disease"
        assert "liver" in answer.highlights
        assert session.state is DialogState.IDLE

        # (b) confirmation rejected four times ends in the chat fallback.
        session = new_session()
        response = engine.handle_utterance(session, "Can you tell me about blood problems?")
        confirm_count = 0
        while response.kind is ResponseKind.CONFIRM_QUESTION:
            confirm_count += 1
            response = engine.handle_confirmation(session, False)
        assert confirm_count == 4
        assert response.kind is ResponseKind.FALLBACK
        assert response.mode_used is Mode.CHAT
        assert session.state is DialogState.IDLE

        # (c) medical miss, social takeover, then chat fallback.
        takeover = make_synthetic_engine(social_has_overlap=True)
        assert takeover._route_mode("alpha one please") is Mode.MEDICAL
        mid = takeover.handle_utterance(new_session(), "alpha one please")
        assert mid.kind is ResponseKind.ANSWER and mid.mode_used is Mode.SOCIAL
        exhausted = make_synthetic_engine(social_has_overlap=False)
        assert exhausted._route_mode("alpha one please") is Mode.MEDICAL
        final = exhausted.handle_utterance(new_session(), "alpha one please")
        assert final.kind is ResponseKind.FALLBACK and final.mode_used is Mode.CHAT

        # (d) point-click round trip.
        session = new_session()
        clicked = engine.handle_point(session, PointEvent("liver", Side.FRONT))
        assert "my liver" in session.history[0][1]
        assert clicked.kind is ResponseKind.ANSWER
        assert clicked.mode_used is Mode.MEDICAL
        assert "liver" in clicked.highlights

        # State-machine invariants fuzzed over 10 000 random input sequences.
        rng = random.Random(99)
        utterances = [
            "What is cirrhosis?",
            "Can you tell me about blood problems?",
            "What helps with pain?",
            "Tell me about photography gear",
            "zzqx vvbn",
            "My chest hurts and I feel sick",
            "Why is the sky blue?",
        ]
        regions = [r.region_id for r in engine.lexicon.regions]
        sequences = 10_000
        turns_handled = 0
        for _ in range(sequences):
            session = new_session()
            consecutive = 0
            for _ in range(rng.randint(1, 3)):
                before = len(session.history)
                if session.state is DialogState.AWAITING_CONFIRMATION:
                    response = engine.handle_confirmation(session, rng.random() < 0.4)
                elif rng.random() < 0.1:
                    region = rng.choice(regions)
                    side = (
                        Side.FRONT
                        if engine.lexicon.by_id[region].front_visible
                        else Side.BACK
                    )
                    response = engine.handle_point(session, PointEvent(region, side))
                else:
                    response = engine.handle_utterance(session, rng.choice(utterances))
                turns_handled += 1
                assert response.kind in (
                    ResponseKind.ANSWER,
                    ResponseKind.CONFIRM_QUESTION,
                    ResponseKind.FALLBACK,
                )
                assert response.text
                if response.kind is ResponseKind.CONFIRM_QUESTION:
                    consecutive += 1
                    assert session.state is DialogState.AWAITING_CONFIRMATION
                else:
                    consecutive = 0
                    assert session.state is DialogState.IDLE
                assert consecutive <= 4
                assert len(session.history) == before + 2
        elapsed = watch.check()
        _report(
            "dialog",
            f"golden transcripts (a)-(d) hold; {sequences} fuzzed sequences "
            f"({turns_handled} turns): boundedness, totality, history monotonicity; "
            f"{elapsed:.2f}s < 20s",
        )


class TestGroundingSuite:
    def test_grounding_criterion(self, lexicon):
        for region in lexicon.regions:
            side = Side.FRONT if region.front_visible else Side.BACK
            phrase = ground.phrase_for_point(lexicon, PointEvent(region.region_id, side))
            assert ground.extract_body_parts(lexicon, phrase) == {region.region_id}
        assert ground.extract_body_parts(lexicon, "pain near the shoulder blade") == {
            "shoulder_blade"
        }
        assert ground.extract_body_parts(lexicon, "It can affect the large intestine.") == {
            "intestines"
        }
        back_count = lexicon.side_count(Side.BACK)
        assert back_count == 33
        _report(
            "grounding",
            f"round trip over all {len(lexicon.regions)} regions; longest-match and "
            f"alias cases hold; back view exposes exactly {back_count} regions",
        )


class TestGatewaySuite:
    def test_gateway_criterion(self, engine, bundle_dir, tmp_path):
        from test_gateway import SCRIPTS, _run_script_http, _run_script_in_process

        with TestClient(create_app(engine)) as client:
            for script in SCRIPTS:
                assert _run_script_http(client, script) == _run_script_in_process(engine, script)

        log_path = tmp_path / "acceptance_log.jsonl"
        logged_engine = bundle_mod.load_engine(bundle_dir, log_path=log_path)
        with TestClient(create_app(logged_engine)) as client:
            session_id = client.post("/sessions").json()["session_id"]
            client.post(f"/sessions/{session_id}/message", json={"text": "What is cirrhosis?"})
        records = [json.loads(line) for line in log_path.read_text().splitlines()]
        assert records
        for record in records:
            assert set(record) == {"session_id", "ts", "user", "agent"}
        assert "testclient" not in log_path.read_text()
        _report(
            "gateway",
            f"{len(SCRIPTS)} golden scripts transport-transparent over HTTP; "
            f"log records carry only session id, timestamp, and turn texts",
        )
