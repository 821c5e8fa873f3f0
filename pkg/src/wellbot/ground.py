"""Bidirectional grounding between answer text and the body-avatar regions.

Bot to patient: scan an answer for body-part phrases and return the avatar
region ids to highlight.  Patient to bot: turn a click on an avatar region
into an utterance fragment the dialog engine can treat as text evidence.
Matching is surface-lexical with longest-phrase-wins resolution; plural forms
and a few common synonyms are shipped as aliases in the lexicon file.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

from .textmodel import tokenize


class Side(enum.Enum):
    FRONT = "front"
    BACK = "back"
    BOTH = "both"


class LexiconFormatError(ValueError):
    """Raised when the lexicon file is malformed."""


class UnknownRegionError(KeyError):
    """Raised for region ids absent from the lexicon or invisible on the clicked side."""


@dataclass(frozen=True)
class BodyRegion:
    region_id: str
    phrase: str  # canonical lowercase body-part phrase
    side: Side

    @property
    def front_visible(self) -> bool:
        return self.side in (Side.FRONT, Side.BOTH)

    @property
    def back_visible(self) -> bool:
        return self.side in (Side.BACK, Side.BOTH)


@dataclass(frozen=True)
class BodyLexicon:
    regions: tuple[BodyRegion, ...]
    aliases: dict[str, str]  # alias phrase -> region_id

    @cached_property
    def by_id(self) -> dict[str, BodyRegion]:
        return {region.region_id: region for region in self.regions}

    @cached_property
    def _phrase_table(self) -> dict[tuple[str, ...], str]:
        table = {tuple(tokenize(r.phrase)): r.region_id for r in self.regions}
        for alias, region_id in self.aliases.items():
            table[tuple(tokenize(alias))] = region_id
        return table

    @cached_property
    def _max_phrase_tokens(self) -> int:
        return max(len(key) for key in self._phrase_table)

    def side_count(self, side: Side) -> int:
        if side is Side.FRONT:
            return sum(1 for region in self.regions if region.front_visible)
        if side is Side.BACK:
            return sum(1 for region in self.regions if region.back_visible)
        return sum(1 for region in self.regions if region.side is Side.BOTH)


@dataclass(frozen=True)
class GroundedAnswer:
    text: str
    highlights: frozenset[str]
    side_hint: Side


@dataclass(frozen=True)
class PointEvent:
    region_id: str
    side: Side

    def __post_init__(self) -> None:
        if self.side is Side.BOTH:
            raise ValueError("a click lands on the front or the back view, not both")


def load_lexicon(path: str | Path | None = None) -> BodyLexicon:
    """Load the avatar body-part lexicon; defaults to the packaged file."""
    if path is None:
        text = resources.files("wellbot").joinpath("data/body_lexicon.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
        raw_regions = document["regions"]
        raw_aliases = document.get("aliases", {})
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise LexiconFormatError(f"malformed lexicon file: {exc}") from exc
    regions: list[BodyRegion] = []
    seen: set[str] = set()
    for raw in raw_regions:
        try:
            region = BodyRegion(
                region_id=raw["region_id"], phrase=raw["phrase"], side=Side(raw["side"])
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise LexiconFormatError(f"malformed region record {raw!r}") from exc
        if region.region_id in seen:
            raise LexiconFormatError(f"duplicate region id {region.region_id!r}")
        if region.phrase != region.phrase.lower():
            raise LexiconFormatError(f"canonical phrase must be lowercase: {region.phrase!r}")
        seen.add(region.region_id)
        regions.append(region)
    for alias, target in raw_aliases.items():
        if target not in seen:
            raise LexiconFormatError(f"alias {alias!r} points at unknown region {target!r}")
    return BodyLexicon(regions=tuple(regions), aliases=dict(raw_aliases))


def extract_body_parts(lexicon: BodyLexicon, text: str) -> frozenset[str]:
    """Region ids mentioned in the text; longer phrases shadow their sub-phrases."""
    tokens = tokenize(text)
    table = lexicon._phrase_table
    max_len = lexicon._max_phrase_tokens
    found: set[str] = set()
    i = 0
    while i < len(tokens):
        for length in range(min(max_len, len(tokens) - i), 0, -1):
            region_id = table.get(tuple(tokens[i : i + length]))
            if region_id is not None:
                found.add(region_id)
                i += length
                break
        else:
            i += 1
    return frozenset(found)


def ground_answer(lexicon: BodyLexicon, answer_text: str) -> GroundedAnswer:
    """Attach highlight regions and the avatar side to show first.

    Front when every highlighted region is front-visible (and by default when
    nothing is highlighted), back when all are back-only, both otherwise.
    """
    highlights = extract_body_parts(lexicon, answer_text)
    regions = [lexicon.by_id[region_id] for region_id in highlights]
    if not regions or all(region.front_visible for region in regions):
        side_hint = Side.FRONT
    elif all(region.side is Side.BACK for region in regions):
        side_hint = Side.BACK
    else:
        side_hint = Side.BOTH
    return GroundedAnswer(text=answer_text, highlights=highlights, side_hint=side_hint)


def phrase_for_point(lexicon: BodyLexicon, event: PointEvent) -> str:
    """Utterance fragment for a click, e.g. the liver region becomes "my liver"."""
    region = lexicon.by_id.get(event.region_id)
    if region is None:
        raise UnknownRegionError(event.region_id)
    visible = region.front_visible if event.side is Side.FRONT else region.back_visible
    if not visible:
        raise UnknownRegionError(
            f"region {event.region_id!r} is not visible on the {event.side.value} view"
        )
    return f"my {region.phrase}"
