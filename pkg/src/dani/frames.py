"""Semantic decoding of tokenized statements and questions into frames.

Decoding is template-positional: the task sentences are rigidly templated,
so frames are extracted from token patterns anchored on a small closed set
of grammatical primitives, plus (in supervised mode) a word-class lexicon.
Weak mode consults only the primitives.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .corpus import Question, Statement, TaskSet
from .errors import DecodeError

log = logging.getLogger(__name__)

# word classes
NAME = "name"
ITEM = "item"
PLACE = "place"
DIRECTION = "direction"
SHAPE = "shape"
COLOUR = "colour"
ANIMAL = "animal"
TIME = "time"
VERB_MOVE = "verb_move"
VERB_TAKE = "verb_take"
VERB_DROP = "verb_drop"
VERB_GIVE = "verb_give"
RELATION = "relation"
QUALIFIER = "qualifier"
GRAMMAR = "grammar"
UNKNOWN = "unknown"

SUPERVISED = "supervised"
WEAK = "weak"

_PRIMITIVE_TERMS = frozenset(
    {"to", "from", "of", "the", "and", "no", "not", "either", "or", "is", "went", "back"}
)

_PRONOUNS = {"he", "she", "it", "they"}

# irregular and regular plural forms; answers use the singular
_SINGULAR = {
    "mice": "mouse",
    "wolves": "wolf",
    "cats": "cat",
    "sheep": "sheep",
    "swans": "swan",
    "lions": "lion",
    "frogs": "frog",
    "rhinos": "rhino",
}

_TIME_RANKS = {
    ("yesterday",): 0,
    ("this", "morning"): 1,
    ("this", "afternoon"): 2,
    ("this", "evening"): 3,
}

_NARRATIVE_PREFIXES = (("after", "that"), ("following", "that"), ("then",), ("afterwards",))


@dataclass(frozen=True)
class Primitives:
    """The fixed set of grammatical terms available in every mode."""

    terms: frozenset[str] = _PRIMITIVE_TERMS

    def __contains__(self, word: str) -> bool:
        return word in self.terms


def builtin_primitives() -> Primitives:
    return Primitives()


@dataclass
class Lexicon:
    """word -> class map.  Weak mode carries no entries at all."""

    entries: dict[str, str]
    mode: str = SUPERVISED

    def classify(self, word: str) -> str:
        if self.mode == WEAK:
            return UNKNOWN
        return self.entries.get(word, UNKNOWN)

    def singular(self, word: str) -> str:
        return _SINGULAR.get(word, word)


def load_word_classes(path: str | Path | None = None) -> dict[str, str]:
    """Read the bundled (or an override) `word<TAB>class` table."""
    if path is None:
        text = resources.files("dani").joinpath("data/word_classes.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    table: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, _, cls = line.partition("\t")
        table[word] = cls
    return table


def build_lexicon_supervised(train: TaskSet, table: dict[str, str] | None = None) -> Lexicon:
    """Assign a class to every word of the training vocabulary.

    Words missing from the classification table default to `unknown` and are
    logged; primitives are intentionally not classified.
    """
    if table is None:
        table = load_word_classes()
    prims = builtin_primitives()
    entries: dict[str, str] = {}
    for story in train.stories:
        for item in story.items:
            vocab = list(item.tokens)
            if isinstance(item, Question):
                vocab.extend(item.gold_answer)
            for word in vocab:
                if word in prims or word in entries:
                    continue
                cls = table.get(word)
                if cls is None:
                    log.warning("word %r missing from classification table", word)
                    cls = UNKNOWN
                entries[word] = cls
    return Lexicon(entries=entries, mode=SUPERVISED)


def weak_lexicon() -> Lexicon:
    return Lexicon(entries={}, mode=WEAK)


# --------------------------------------------------------------------------
# statement frames

@dataclass(frozen=True)
class Move:
    actors: tuple[str, ...]
    destination: str
    event_index: int = 0
    time_rank: Optional[int] = None  # tasks with scrambled narrative order


@dataclass(frozen=True)
class Take:
    actor: str
    item: str
    event_index: int = 0


@dataclass(frozen=True)
class Drop:
    actor: str
    item: str
    event_index: int = 0


@dataclass(frozen=True)
class Give:
    giver: str
    receiver: str
    item: str
    event_index: int = 0


@dataclass(frozen=True)
class Relation:
    """`subject <attribute> object`, e.g. office -north- garden."""

    subject: str
    attribute: str
    object: str
    event_index: int = 0


@dataclass(frozen=True)
class Property:
    entity: str
    attribute: str
    kind: str  # "species" | "colour" | "state"
    event_index: int = 0


@dataclass(frozen=True)
class Either:
    actor: str
    places: tuple[str, ...]
    event_index: int = 0


@dataclass(frozen=True)
class Negation:
    inner: "Frame"
    event_index: int = 0


Frame = Union[Move, Take, Drop, Give, Relation, Property, Either, Negation]


# --------------------------------------------------------------------------
# question frames

@dataclass(frozen=True)
class WhereEntity:
    entity: str


@dataclass(frozen=True)
class HistoricalBefore:
    entity: str
    place: str


@dataclass(frozen=True)
class WhatRelation:
    anchor: str
    relation: str
    seek: str  # "subject": answer REL anchor; "object": anchor REL answer


@dataclass(frozen=True)
class GiveQ:
    seek: str  # "item" | "giver" | "receiver"
    giver: Optional[str] = None
    receiver: Optional[str] = None
    item: Optional[str] = None


@dataclass(frozen=True)
class YesNoAt:
    actor: str
    place: str


@dataclass(frozen=True)
class Count:
    actor: str


@dataclass(frozen=True)
class ListHeld:
    actor: str


@dataclass(frozen=True)
class PathQuery:
    origin: str
    goal: str


@dataclass(frozen=True)
class PositionalQ:
    a: str
    relation: str  # left | right | above | below
    b: str


@dataclass(frozen=True)
class SizeQ:
    a: str
    op: str  # "bigger" | "fits"
    b: str


@dataclass(frozen=True)
class DeduceQ:
    entity: str


@dataclass(frozen=True)
class InductionQ:
    entity: str


@dataclass(frozen=True)
class WhereWillQ:
    actor: str


@dataclass(frozen=True)
class WhyQ:
    actor: str
    target: Optional[str] = None


QueryFrame = Union[
    WhereEntity, HistoricalBefore, WhatRelation, GiveQ, YesNoAt, Count,
    ListHeld, PathQuery, PositionalQ, SizeQ, DeduceQ, InductionQ,
    WhereWillQ, WhyQ,
]


# --------------------------------------------------------------------------
# coreference context

@dataclass
class StoryContext:
    """Story-confined decoding state: event counter and pronoun referents."""

    event_index: int = 0
    last_single: Optional[str] = None
    last_group: tuple[str, ...] = ()

    def next_event(self) -> int:
        self.event_index += 1
        return self.event_index

    def note_actors(self, actors: tuple[str, ...]) -> None:
        if len(actors) == 1:
            self.last_single = actors[0]
        self.last_group = actors

    def resolve(self, pronoun: str) -> tuple[str, ...]:
        if pronoun == "they":
            if not self.last_group:
                raise DecodeError((pronoun,), "no referent for pronoun")
            return self.last_group
        if self.last_single is None:
            raise DecodeError((pronoun,), "no referent for pronoun")
        return (self.last_single,)


# --------------------------------------------------------------------------
# statement decoding

def _strip_narrative_prefix(tokens: list[str]) -> list[str]:
    for prefix in _NARRATIVE_PREFIXES:
        if tuple(tokens[: len(prefix)]) == prefix:
            return tokens[len(prefix):]
    return tokens


def _strip_time_marker(tokens: list[str]) -> tuple[list[str], Optional[int]]:
    for marker, rank in _TIME_RANKS.items():
        n = len(marker)
        if tuple(tokens[:n]) == marker:
            return tokens[n:], rank
        if tuple(tokens[-n:]) == marker:
            return tokens[:-n], rank
    return tokens, None


def _join(tokens: list[str]) -> str:
    if not tokens:
        raise DecodeError(tokens, "empty entity phrase")
    return " ".join(tokens)


def _after_the(tokens: list[str]) -> str:
    # entity phrase written as "the <words...>"
    if not tokens or tokens[0] != "the":
        raise DecodeError(tokens, "expected 'the' before entity")
    return _join(tokens[1:])


def _decode_the_relation(tokens: list[str], ctx: StoryContext, lex: Lexicon) -> Frame:
    """Statements that relate two article-prefixed entities."""
    if "fits" in tokens:
        i = tokens.index("fits")
        subj = _join(tokens[1:i])
        rest = tokens[i + 1:]
        if rest and rest[0] in ("inside", "in"):
            outer = _after_the(rest[1:])
            # normalized to a single size ordering: outer is bigger
            return Relation(outer, "bigger", subj, ctx.next_event())
        raise DecodeError(tokens)
    if "is" not in tokens:
        raise DecodeError(tokens)
    i = tokens.index("is")
    subj = _join(tokens[1:i])
    rest = tokens[i + 1:]
    if len(rest) >= 5 and rest[0] == "to" and rest[1] == "the" and rest[3] == "of":
        return Relation(subj, rest[2], _after_the(rest[4:]), ctx.next_event())
    if len(rest) >= 4 and rest[0] == "on" and rest[1] == "top" and rest[2] == "of":
        return Relation(subj, "above", _after_the(rest[3:]), ctx.next_event())
    if len(rest) >= 3 and rest[0] in ("above", "below"):
        return Relation(subj, rest[0], _after_the(rest[1:]), ctx.next_event())
    if len(rest) >= 4 and rest[0] == "bigger" and rest[1] == "than":
        return Relation(subj, "bigger", _after_the(rest[2:]), ctx.next_event())
    if len(rest) >= 4 and rest[1] == "of" and rest[2] == "the":
        # "the A is <rel> of the B" -- the primitives suffice here, so this
        # pattern is shared by both modes (weak mode lives on it)
        return Relation(subj, rest[0], _join(rest[3:]), ctx.next_event())
    raise DecodeError(tokens)


def _parse_actors(tokens: list[str], ctx: StoryContext, lex: Lexicon) -> tuple[tuple[str, ...], list[str]]:
    """Split the leading actor phrase off a statement."""
    if tokens[0] in _PRONOUNS:
        return ctx.resolve(tokens[0]), tokens[1:]
    if len(tokens) >= 3 and tokens[1] == "and" and tokens[2] not in _PRONOUNS:
        return (tokens[0], tokens[2]), tokens[3:]
    return (tokens[0],), tokens[1:]


def _decode_is_clause(actor: str, rest: list[str], ctx: StoryContext, lex: Lexicon) -> Frame:
    """`<actor> is ...` statements: assertions, negations, properties."""
    if rest[:3] == ["no", "longer", "in"] and rest[3] == "the":
        inner = Move((actor,), _join(rest[4:]), ctx.next_event())
        return Negation(inner, inner.event_index)
    if rest[:2] == ["not", "in"] and rest[2] == "the":
        inner = Move((actor,), _join(rest[3:]), ctx.next_event())
        return Negation(inner, inner.event_index)
    if rest[0] == "in" and rest[1] == "the":
        return Move((actor,), _join(rest[2:]), ctx.next_event())
    if rest[0] == "either" and "or" in rest:
        # "is either in the A or the B"
        i = rest.index("or")
        first = _after_the(rest[2:i])
        second = _after_the(rest[i + 1:])
        return Either(actor, (first, second), ctx.next_event())
    if rest[0] == "a" or rest[0] == "an":
        species = lex.singular(rest[1])
        return Property(actor, species, "species", ctx.next_event())
    if len(rest) == 1:
        word = rest[0]
        cls = lex.classify(word)
        kind = "colour" if cls == COLOUR else "state"
        return Property(actor, word, kind, ctx.next_event())
    raise DecodeError(rest)


def decode_statement(s: Statement, lex: Lexicon, ctx: StoryContext) -> Frame:
    """Decode one statement into a fully grounded frame.

    Raises DecodeError when no template matches; the caller scores that as a
    wrong answer downstream.
    """
    tokens = _strip_narrative_prefix(list(s.tokens))
    tokens, time_rank = _strip_time_marker(tokens)
    if not tokens:
        raise DecodeError(s.tokens)

    if tokens[0] == "the":
        return _decode_the_relation(tokens, ctx, lex)

    # species-level statements: "mice are afraid of wolves"
    if "are" in tokens and "afraid" in tokens:
        i = tokens.index("are")
        if tokens[i + 1: i + 3] == ["afraid", "of"]:
            subj = lex.singular(_join(tokens[:i]))
            obj = lex.singular(_join(tokens[i + 3:]))
            return Relation(subj, "afraid", obj, ctx.next_event())

    actors, rest = _parse_actors(tokens, ctx, lex)
    if not rest:
        raise DecodeError(s.tokens)
    verb = rest[0]
    cls = lex.classify(verb)

    frame: Frame
    if verb == "is":
        frame = _decode_is_clause(actors[0], rest[1:], ctx, lex)
    elif cls == VERB_MOVE or verb == "went" or (lex.mode == WEAK and rest[1:2] == ["to"]) \
            or (lex.mode == WEAK and rest[1:3] == ["back", "to"]):
        body = rest[1:]
        if body[:1] == ["back"]:
            body = body[1:]
        if body[:2] != ["to", "the"]:
            raise DecodeError(s.tokens)
        frame = Move(actors, _join(body[2:]), ctx.next_event(), time_rank)
    elif cls == VERB_TAKE:
        body = rest[1:]
        if body[:1] == ["up"]:  # "picked up"
            body = body[1:]
        if body[-1:] == ["there"]:
            body = body[:-1]
        frame = Take(actors[0], _after_the(body), ctx.next_event())
    elif cls == VERB_DROP:
        body = rest[1:]
        if body[:1] == ["down"]:  # "put down"
            body = body[1:]
        if body[-1:] == ["there"]:
            body = body[:-1]
        frame = Drop(actors[0], _after_the(body), ctx.next_event())
    elif cls == VERB_GIVE:
        body = rest[1:]
        if "to" not in body:
            raise DecodeError(s.tokens)
        i = body.index("to")
        item = _after_the(body[:i])
        receiver = _join(body[i + 1:])
        frame = Give(actors[0], receiver, item, ctx.next_event())
    else:
        raise DecodeError(s.tokens)

    ctx.note_actors(actors)
    return frame


# --------------------------------------------------------------------------
# question decoding

def decode_question(q: Question, lex: Lexicon, ctx: StoryContext) -> QueryFrame:
    """Decode one question into a query frame; ctx is read-only here."""
    t = list(q.tokens)
    if len(t) < 2:
        raise DecodeError(q.tokens)

    if t[0] == "where":
        if t[1] == "is":
            entity = t[3] if t[2] == "the" else t[2]
            return WhereEntity(entity)
        if t[1] == "was" and "before" in t:
            i = t.index("before")
            ent_toks = t[2:i]
            if ent_toks and ent_toks[0] == "the":
                ent_toks = ent_toks[1:]
            return HistoricalBefore(_join(ent_toks), _after_the(t[i + 1:]))
        if t[1] == "will" and t[-1] == "go":
            return WhereWillQ(t[2])
    elif t[0] == "what":
        if t[1] == "color" or t[1] == "colour":
            return InductionQ(t[-1])
        if t[1] == "did" and "give" in t:
            i = t.index("give")
            if t[i + 1] == "to":
                return GiveQ(seek="item", giver=t[2], receiver=_join(t[i + 2:]))
        if t[1] == "is":
            if "afraid" in t:
                return DeduceQ(t[2])
            if t[2] == "the" and t[-1] == "of":
                return WhatRelation(anchor=_join(t[3:-2]), relation=t[-2], seek="object")
            if len(t) >= 6 and t[3] == "of" and t[4] == "the":
                return WhatRelation(anchor=_join(t[5:]), relation=t[2], seek="subject")
            if t[-1] in ("carrying", "holding"):
                return ListHeld(t[2])
    elif t[0] == "who":
        if t[1] == "gave":
            item_toks = t[2:]
            if "to" in item_toks:
                i = item_toks.index("to")
                return GiveQ(seek="giver", item=_after_the(item_toks[:i]),
                             receiver=_join(item_toks[i + 1:]))
            return GiveQ(seek="giver", item=_after_the(item_toks))
        if t[1] == "did" and "give" in t and t[-1] == "to":
            i = t.index("give")
            return GiveQ(seek="receiver", giver=t[2], item=_after_the(t[i + 1:-1]))
        if t[1] == "received":
            return GiveQ(seek="receiver", item=_after_the(t[2:]))
    elif t[0] == "is":
        if t[1] == "the":
            return _decode_object_yesno(t)
        if t[2] == "in" and t[3] == "the":
            return YesNoAt(t[1], _join(t[4:]))
    elif t[0] == "does" and "fit" in t:
        i = t.index("fit")
        inner = _after_the(t[1:i])
        if t[i + 1] in ("in", "inside"):
            return SizeQ(inner, "fits", _after_the(t[i + 2:]))
    elif t[0] == "how":
        if t[1] == "many" and "is" in t:
            i = t.index("is")
            return Count(t[i + 1])
        if "from" in t and "to" in t:
            i = t.index("from")
            j = t.index("to", i)
            return PathQuery(_after_the(t[i + 1:j]), _after_the(t[j + 1:]))
    elif t[0] == "why" and t[1] == "did":
        if "go" in t:
            i = t.index("go")
            return WhyQ(t[2], _after_the(t[i + 2:]))
        if "get" in t:
            i = t.index("get")
            return WhyQ(t[2], _after_the(t[i + 1:]))
    raise DecodeError(q.tokens)


def _decode_object_yesno(t: list[str]) -> QueryFrame:
    """`is the <A> <relation...> the <B>` questions (positional / size)."""
    if "bigger" in t:
        i = t.index("bigger")
        return SizeQ(_join(t[2:i]), "bigger", _after_the(t[i + 2:]))
    for i in range(2, len(t)):
        if t[i] == "to" and t[i + 1: i + 2] == ["the"] and t[i + 3: i + 4] == ["of"]:
            return PositionalQ(_join(t[2:i]), t[i + 2], _after_the(t[i + 4:]))
        if t[i] in ("above", "below"):
            return PositionalQ(_join(t[2:i]), t[i], _after_the(t[i + 1:]))
        if t[i] == "on" and t[i + 1: i + 3] == ["top", "of"]:
            return PositionalQ(_join(t[2:i]), "above", _after_the(t[i + 3:]))
    raise DecodeError(tuple(t))
