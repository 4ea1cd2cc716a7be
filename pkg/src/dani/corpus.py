"""bAbI corpus ingestion.

Reads raw task files in the bAbI v1.2 text format and segments them into
stories of statements and questions.  The format is one line per sentence:

    <id> <statement text>
    <id> <question text>\t<answer>\t<space-separated supporting ids>

Line ids restart at 1 at every story boundary.  Statement tokens are
lowercased with one terminal "." or "?" stripped; everything else is kept
verbatim so a parsed story can be re-serialized byte for byte.
"""

from __future__ import annotations

import tarfile
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Union

from .errors import FetchError, IoError, ParseError

STATEMENT = "statement"
QUESTION = "question"


@dataclass(frozen=True)
class RawLine:
    """One numbered line of a task file, before tokenization."""

    line_id: int
    body: str
    kind: str  # STATEMENT or QUESTION

    def __post_init__(self):
        if self.line_id < 1:
            raise ParseError(f"line id must be >= 1, got {self.line_id}")


@dataclass(frozen=True)
class Statement:
    line_id: int
    tokens: tuple[str, ...]
    raw: str  # original body, for round-trip serialization

    def __post_init__(self):
        if not self.tokens:
            raise ParseError("statement has no tokens")


@dataclass(frozen=True)
class Question:
    line_id: int
    tokens: tuple[str, ...]
    gold_answer: tuple[str, ...]
    support_ids: tuple[int, ...]  # evaluation metadata only, never used to train
    raw: str

    def __post_init__(self):
        if not self.gold_answer:
            raise ParseError("question has no gold answer")


Item = Union[Statement, Question]


@dataclass(frozen=True)
class Story:
    """A maximal run of lines whose ids restart at 1."""

    items: tuple[Item, ...]

    @property
    def statements(self) -> tuple[Statement, ...]:
        return tuple(i for i in self.items if isinstance(i, Statement))

    @property
    def questions(self) -> tuple[Question, ...]:
        return tuple(i for i in self.items if isinstance(i, Question))


@dataclass(frozen=True)
class TaskSet:
    task_id: int
    split: str  # "train" | "test"
    stories: tuple[Story, ...]

    def __post_init__(self):
        if not 1 <= self.task_id <= 20:
            raise ParseError(f"task id must be 1..20, got {self.task_id}")
        if self.split not in ("train", "test"):
            raise ParseError(f"split must be train or test, got {self.split!r}")

    @property
    def question_count(self) -> int:
        return sum(len(s.questions) for s in self.stories)


def tokenize(text: str) -> tuple[str, ...]:
    """Lowercase, split on whitespace, strip one terminal "." or "?"."""
    words = text.lower().split()
    if words and words[-1][-1] in ".?":
        last = words[-1][:-1]
        if last:
            words[-1] = last
        else:
            words.pop()
    return tuple(words)


def parse_line(text: str, line_no: int | None = None) -> RawLine | None:
    """Parse one raw file line; blank lines yield None.

    A line is a question iff it contains a tab.
    """
    stripped = text.rstrip("\n").rstrip("\r")
    if not stripped.strip():
        return None
    head, _, body = stripped.partition(" ")
    if not head.isdigit():
        raise ParseError(f"malformed line id {head!r}", line_no)
    kind = QUESTION if "\t" in body else STATEMENT
    if kind == QUESTION:
        fields = body.split("\t")
        if len(fields) < 2 or not fields[1].strip():
            raise ParseError("question line is missing its answer field", line_no)
    return RawLine(line_id=int(head), body=body, kind=kind)


def _materialize(raw: RawLine, line_no: int | None = None) -> Item:
    if raw.kind == STATEMENT:
        return Statement(line_id=raw.line_id, tokens=tokenize(raw.body), raw=raw.body)
    fields = raw.body.split("\t")
    q_text, answer = fields[0], fields[1]
    support: tuple[int, ...] = ()
    if len(fields) > 2 and fields[2].strip():
        try:
            support = tuple(int(x) for x in fields[2].split())
        except ValueError:
            raise ParseError(f"malformed support ids {fields[2]!r}", line_no)
    gold = tuple(t.strip().lower() for t in answer.split(",") if t.strip())
    return Question(
        line_id=raw.line_id,
        tokens=tokenize(q_text),
        gold_answer=gold,
        support_ids=support,
        raw=raw.body,
    )


def segment_stories(lines: Iterable[RawLine]) -> list[Story]:
    """Group lines into stories: a new story begins where line_id resets to 1.

    Within a story, ids must be strictly increasing (gaps are fine; shuffled
    task variants elide lines without renumbering).
    """
    stories: list[Story] = []
    current: list[Item] = []
    prev_id = 0
    for raw in lines:
        if raw.line_id == 1:
            if current:
                stories.append(Story(items=tuple(current)))
            current = []
        elif raw.line_id <= prev_id:
            raise ParseError(
                f"line id {raw.line_id} does not increase from {prev_id} "
                "and does not start a new story"
            )
        current.append(_materialize(raw))
        prev_id = raw.line_id
    if current:
        stories.append(Story(items=tuple(current)))
    return stories


def serialize_story(story: Story) -> list[str]:
    """Inverse of parsing: `<id> <body>` per line, bodies verbatim."""
    return [f"{item.line_id} {item.raw}" for item in story.items]


def parse_lines(lines: Iterable[str]) -> list[Story]:
    raws = []
    for line_no, text in enumerate(lines, start=1):
        try:
            raw = parse_line(text, line_no)
        except ParseError:
            raise
        if raw is not None:
            raws.append(raw)
    return segment_stories(raws)


def load_task(path: str | Path, task_id: int, split: str) -> TaskSet:
    """Parse one task file into a TaskSet."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        stories = parse_lines(text.splitlines())
    except ParseError as exc:
        raise ParseError(f"{exc}", path=path) from exc
    return TaskSet(task_id=task_id, split=split, stories=tuple(stories))


# Canonical file names of the v1.2 release, used to locate task files on disk.
TASK_FILE_STEMS = {
    1: "qa1_single-supporting-fact",
    2: "qa2_two-supporting-facts",
    3: "qa3_three-supporting-facts",
    4: "qa4_two-arg-relations",
    5: "qa5_three-arg-relations",
    6: "qa6_yes-no-questions",
    7: "qa7_counting",
    8: "qa8_lists-sets",
    9: "qa9_simple-negation",
    10: "qa10_indefinite-knowledge",
    11: "qa11_basic-coreference",
    12: "qa12_conjunction",
    13: "qa13_compound-coreference",
    14: "qa14_time-reasoning",
    15: "qa15_basic-deduction",
    16: "qa16_basic-induction",
    17: "qa17_positional-reasoning",
    18: "qa18_size-reasoning",
    19: "qa19_path-finding",
    20: "qa20_agents-motivations",
}

_SEARCH_SUBDIRS = ("", "en", "tasks_1-20_v1-2/en")


def find_task_file(data_dir: str | Path, task_id: int, split: str) -> Path:
    """Locate `qa<N>_*_<split>.txt` under common dataset layouts."""
    data_dir = Path(data_dir)
    for sub in _SEARCH_SUBDIRS:
        base = data_dir / sub if sub else data_dir
        if not base.is_dir():
            continue
        hits = sorted(base.glob(f"qa{task_id}_*_{split}.txt"))
        if hits:
            return hits[0]
    raise IoError(f"no task {task_id} {split} file under {data_dir}")


def load_task_from_dir(data_dir: str | Path, task_id: int, split: str) -> TaskSet:
    return load_task(find_task_file(data_dir, task_id, split), task_id, split)


DATASET_URL = "http://www.thespermwhale.com/jaseweston/babi/tasks_1-20_v1-2.tar.gz"


def fetch_dataset(url: str = DATASET_URL, dest: str | Path = "data/babi") -> Path:
    """Download and unpack the task archive under `dest`.

    Idempotent: if a task 1 train file is already present, nothing happens.
    Returns the destination directory.
    """
    dest = Path(dest)
    if dest.is_dir() and any(dest.glob("**/qa1_*_train.txt")):
        return dest
    dest.mkdir(parents=True, exist_ok=True)
    try:
        with tempfile.NamedTemporaryFile(suffix=".tar.gz", delete=False) as tmp:
            with urllib.request.urlopen(url) as resp:
                while chunk := resp.read(1 << 16):
                    tmp.write(chunk)
            archive = Path(tmp.name)
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise FetchError(f"cannot fetch {url}: {exc}") from exc
    try:
        with tarfile.open(archive) as tar:
            for member in tar.getmembers():
                name = Path(member.name)
                if name.is_absolute() or ".." in name.parts:
                    raise FetchError(f"unsafe archive member {member.name!r}")
            tar.extractall(dest)
    except tarfile.TarError as exc:
        raise FetchError(f"cannot unpack {archive}: {exc}") from exc
    finally:
        archive.unlink(missing_ok=True)
    return dest
