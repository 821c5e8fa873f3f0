"""Session state machine: mode routing, gated topic prediction, confirmation
loop, retrieval with grounding, and the graceful-failure cascade.

Every utterance terminates in exactly one of three response kinds:

* ``ANSWER``   - retrieved sentences, grounded on the avatar in medical mode;
* ``CONFIRM_QUESTION`` - the gate was unsure, so the engine offers ranked
  topic candidates one at a time, at most four prompts in total;
* ``FALLBACK`` - neither the medical nor the social corpus had information,
  so the chat fallback replies with a neutral template.

Sessions carry no user identifiers: an opaque random id, the transcript, and
timestamps are the only persisted state.
"""

from __future__ import annotations

import enum
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import calibrate, chatfallback, ground, retrieve, textmodel
from .calibrate import GateKind, Temperature
from .ground import BodyLexicon, PointEvent, Side
from .retrieve import SentenceIndex
from .textmodel import Featurizer, LinearClassifier

DEFAULT_THRESHOLD = 0.9


class DialogError(Exception):
    """Base class for dialog-engine errors."""


class EmptyUtteranceError(DialogError):
    """The utterance was empty after trimming."""


class WrongStateError(DialogError):
    """The call does not match the session state (e.g. message while confirming)."""


class DialogState(enum.Enum):
    IDLE = "idle"
    AWAITING_CONFIRMATION = "awaiting_confirmation"


class Mode(enum.Enum):
    MEDICAL = "medical_qa"
    SOCIAL = "social"
    CHAT = "chat"


class ResponseKind(enum.Enum):
    ANSWER = "answer"
    CONFIRM_QUESTION = "confirm_question"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class ConfirmationContext:
    candidates: tuple[str, ...]  # ranked topic labels, at most 4
    cursor: int
    origin_utterance: str
    mode: Mode

    def __post_init__(self) -> None:
        if not self.candidates or len(self.candidates) > calibrate.MAX_CONFIRM_CANDIDATES:
            raise ValueError("confirmation needs 1 to 4 candidates")
        if not (0 <= self.cursor < len(self.candidates)):
            raise ValueError("cursor out of range")


@dataclass
class Session:
    id: str
    state: DialogState = DialogState.IDLE
    history: list[tuple[str, str, float]] = field(default_factory=list)  # speaker, text, ts
    pending: ConfirmationContext | None = None


@dataclass(frozen=True)
class AgentResponse:
    kind: ResponseKind
    text: str
    highlights: frozenset[str] = frozenset()
    side_hint: Side = Side.FRONT
    mode_used: Mode = Mode.CHAT
    topic: str | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "text": self.text,
            "highlights": sorted(self.highlights),
            "side_hint": self.side_hint.value,
            "mode_used": self.mode_used.value,
            "topic": self.topic,
        }


def new_session() -> Session:
    """Fresh idle session with a 128-bit random id and empty history."""
    return Session(id=secrets.token_hex(16))


@dataclass(frozen=True)
class TopicRoute:
    """One mode's topic classifier with its calibration temperature and index."""

    featurizer: Featurizer
    classifier: LinearClassifier
    temperature: Temperature
    index: SentenceIndex


class TranscriptLog:
    """Append-only JSON-lines log of handled turns: id, timestamp, both texts."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, session_id: str, user_text: str, agent_text: str) -> None:
        record = {
            "session_id": session_id,
            "ts": time.time(),
            "user": user_text,
            "agent": agent_text,
        }
        with self._lock:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")


class DialogEngine:
    """Wires the trained models, indices, and lexicon into the turn handler."""

    def __init__(
        self,
        mode_featurizer: Featurizer,
        mode_classifier: LinearClassifier,
        medical: TopicRoute,
        social: TopicRoute,
        lexicon: BodyLexicon,
        threshold: float = DEFAULT_THRESHOLD,
        top_k: int = retrieve.DEFAULT_TOP_K,
        reply_seed: int = 0,
        transcript_log: TranscriptLog | None = None,
    ):
        if not (0 < threshold <= 1):
            raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
        if "medical" not in mode_classifier.labels or "social" not in mode_classifier.labels:
            raise ValueError("mode classifier must carry the labels 'medical' and 'social'")
        self.mode_featurizer = mode_featurizer
        self.mode_classifier = mode_classifier
        self.routes = {Mode.MEDICAL: medical, Mode.SOCIAL: social}
        self.lexicon = lexicon
        self.threshold = threshold
        self.top_k = top_k
        self.reply_seed = reply_seed
        self.transcript_log = transcript_log

    # -- turn handlers --

    def handle_utterance(
        self, session: Session, text: str, force_mode: Mode | None = None
    ) -> AgentResponse:
        if session.state is DialogState.AWAITING_CONFIRMATION:
            raise WrongStateError(
                "a topic confirmation is pending; answer it via handle_confirmation"
            )
        utterance = text.strip()
        if not utterance:
            raise EmptyUtteranceError("utterance is empty")
        response, pending = self._respond(utterance, force_mode)
        self._commit(session, utterance, response, pending)
        return response

    def handle_confirmation(self, session: Session, affirmed: bool) -> AgentResponse:
        if session.state is not DialogState.AWAITING_CONFIRMATION or session.pending is None:
            raise WrongStateError("no topic confirmation is pending")
        context = session.pending
        user_text = "yes" if affirmed else "no"
        if affirmed:
            response = self._answer_or_cascade(
                context.origin_utterance, context.mode, context.candidates[context.cursor]
            )
            pending = None
        else:
            cursor = context.cursor + 1
            limit = min(calibrate.MAX_CONFIRM_CANDIDATES, len(context.candidates))
            if cursor >= limit:
                response = self._fallback(context.origin_utterance)
                pending = None
            else:
                pending = ConfirmationContext(
                    candidates=context.candidates,
                    cursor=cursor,
                    origin_utterance=context.origin_utterance,
                    mode=context.mode,
                )
                response = self._confirm_question(pending)
        self._commit(session, user_text, response, pending)
        return response

    def handle_point(self, session: Session, event: PointEvent) -> AgentResponse:
        if session.state is DialogState.AWAITING_CONFIRMATION:
            raise WrongStateError(
                "a topic confirmation is pending; answer it via handle_confirmation"
            )
        phrase = ground.phrase_for_point(self.lexicon, event)
        utterance = f"I am not feeling well. It is {phrase}."
        # A body click is medical evidence: skip the mode classifier.
        return self.handle_utterance(session, utterance, force_mode=Mode.MEDICAL)

    # -- pipeline stages --

    def _respond(
        self, utterance: str, force_mode: Mode | None
    ) -> tuple[AgentResponse, ConfirmationContext | None]:
        mode = force_mode or self._route_mode(utterance)
        route = self.routes[mode]
        vector = textmodel.encode(route.featurizer, utterance)
        logits = textmodel.Logits(
            values=route.classifier.weights @ vector + route.classifier.bias,
            labels=route.classifier.labels,
        )
        prediction = calibrate.softmax_with_temperature(logits, route.temperature)
        if not np.any(vector):
            # No lexical evidence: confirmation would be meaningless, so walk
            # the direct retrieval path and let the cascade degrade.
            decision = calibrate.GateDecision(
                kind=GateKind.DIRECT, topic=prediction.top_label
            )
        else:
            decision = calibrate.gate(prediction, self.threshold)
        if decision.kind is GateKind.DIRECT:
            return self._answer_or_cascade(utterance, mode, decision.topic), None
        pending = ConfirmationContext(
            candidates=decision.candidates, cursor=0, origin_utterance=utterance, mode=mode
        )
        return self._confirm_question(pending), pending

    def _route_mode(self, utterance: str) -> Mode:
        label = textmodel.predict_label(self.mode_classifier, self.mode_featurizer, utterance)
        return Mode.MEDICAL if label == "medical" else Mode.SOCIAL

    def _answer_or_cascade(self, utterance: str, mode: Mode, topic: str) -> AgentResponse:
        route = self.routes[mode]
        answer = self._retrieve(route.index, utterance, topic)
        if answer.sentence_ids:
            return self._make_answer(answer.text, mode, topic)
        if mode is Mode.MEDICAL:
            # The medical corpus had nothing; let the social side take over.
            social = self.routes[Mode.SOCIAL]
            social_topic = textmodel.predict_label(
                social.classifier, social.featurizer, utterance
            )
            social_answer = self._retrieve(social.index, utterance, social_topic)
            if social_answer.sentence_ids:
                return self._make_answer(social_answer.text, Mode.SOCIAL, social_topic)
        return self._fallback(utterance)

    def _retrieve(self, index: SentenceIndex, utterance: str, topic: str) -> retrieve.RankedAnswer:
        if topic not in index.by_topic:
            return retrieve.RankedAnswer(sentence_ids=(), scores=(), text="")
        return retrieve.score_sentences(index, utterance, topic, self.top_k)

    def _make_answer(self, text: str, mode: Mode, topic: str) -> AgentResponse:
        if mode is Mode.MEDICAL:
            grounded = ground.ground_answer(self.lexicon, text)
            return AgentResponse(
                kind=ResponseKind.ANSWER,
                text=text,
                highlights=grounded.highlights,
                side_hint=grounded.side_hint,
                mode_used=Mode.MEDICAL,
                topic=topic,
            )
        return AgentResponse(
            kind=ResponseKind.ANSWER, text=text, mode_used=Mode.SOCIAL, topic=topic
        )

    def _confirm_question(self, pending: ConfirmationContext) -> AgentResponse:
        candidate = pending.candidates[pending.cursor]
        return AgentResponse(
            kind=ResponseKind.CONFIRM_QUESTION,
            text=f"It sounds like you are asking about {candidate}. Did I get that right?",
            mode_used=pending.mode,
            topic=candidate,
        )

    def _fallback(self, utterance: str) -> AgentResponse:
        return AgentResponse(
            kind=ResponseKind.FALLBACK,
            text=chatfallback.generic_reply(utterance, self.reply_seed),
            mode_used=Mode.CHAT,
        )

    def _commit(
        self,
        session: Session,
        user_text: str,
        response: AgentResponse,
        pending: ConfirmationContext | None,
    ) -> None:
        now = time.time()
        session.history.append(("user", user_text, now))
        session.history.append(("agent", response.text, now))
        session.pending = pending
        session.state = (
            DialogState.AWAITING_CONFIRMATION
            if response.kind is ResponseKind.CONFIRM_QUESTION
            else DialogState.IDLE
        )
        if self.transcript_log is not None:
            self.transcript_log.append(session.id, user_text, response.text)


class SessionStore:
    """In-memory session map with a per-session lock for exclusive turn handling."""

    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def create(self) -> Session:
        session = new_session()
        with self._guard:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
        return session

    def get(self, session_id: str) -> Session | None:
        with self._guard:
            return self._sessions.get(session_id)

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks[session_id]

    def __len__(self) -> int:
        with self._guard:
            return len(self._sessions)
