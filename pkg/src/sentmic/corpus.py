"""Forum post ingestion and corpus filtering.

Raw dumps are CSV with header ``date,text,reads,replies,url``. The cleaned
output adds a leading ``post_id`` column holding the 1-based ordinal of the
row in the raw dump, so downstream probability files can key on it.
"""

from __future__ import annotations

import csv
import io
import re
from collections import defaultdict
from dataclasses import dataclass, replace
from datetime import date, datetime
from typing import IO, Iterable, Sequence

from .errors import DuplicatePostId, EmptyInput, MalformedRow

RAW_HEADER = ["date", "text", "reads", "replies", "url"]
CLEAN_HEADER = ["post_id"] + RAW_HEADER


@dataclass(frozen=True)
class ForumPost:
    post_id: str
    posted_at: date
    text: str
    read_count: int = 0
    reply_count: int = 0
    source_url: str = ""

    def __post_init__(self):
        if self.read_count < 0 or self.reply_count < 0:
            raise ValueError("read/reply counts must be non-negative")


@dataclass(frozen=True)
class CorpusFilterConfig:
    max_chars: int = 150
    top_per_day: int = 50

    def __post_init__(self):
        if self.max_chars < 1 or self.top_per_day < 1:
            raise ValueError("max_chars and top_per_day must be >= 1")


def _as_text(stream: IO) -> IO[str]:
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(bytes(stream).decode("utf-8-sig"), newline="")
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")


def _parse_count(raw: str, line: int, source: str | None) -> int:
    raw = raw.strip()
    if raw == "":
        return 0
    try:
        value = int(raw)
    except ValueError:
        try:
            # exports sometimes carry "95.0"
            f = float(raw)
        except ValueError:
            raise MalformedRow(line, f"not an integer: {raw!r}", source) from None
        if not f.is_integer():
            raise MalformedRow(line, f"not an integer: {raw!r}", source)
        value = int(f)
    if value < 0:
        raise MalformedRow(line, f"negative count: {raw!r}", source)
    return value


def parse_date(raw: str) -> date:
    return datetime.strptime(raw.strip(), "%Y-%m-%d").date()


def parse_posts(stream, source: str | None = None) -> list[ForumPost]:
    """Read a posts CSV (raw or cleaned layout) into ``ForumPost`` records.

    Raw rows get ``post_id`` = data-row ordinal starting at 1. Raises
    ``MalformedRow`` with the physical line number, ``EmptyInput`` when
    there are no data rows.
    """
    reader = csv.reader(_as_text(stream))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput(f"{source or 'posts input'}: no header") from None
    header = [h.strip() for h in header]
    if header == RAW_HEADER:
        has_id = False
    elif header == CLEAN_HEADER:
        has_id = True
    else:
        raise MalformedRow(1, f"unexpected header {header!r}", source)

    width = len(header)
    posts: list[ForumPost] = []
    seen: set[str] = set()
    ordinal = 0
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        ordinal += 1
        if len(row) != width:
            raise MalformedRow(line, f"expected {width} columns, got {len(row)}", source)
        if has_id:
            post_id, *row = row
            post_id = post_id.strip()
            if post_id in seen:
                raise DuplicatePostId(post_id, source)
            seen.add(post_id)
        else:
            post_id = str(ordinal)
        raw_date, text, reads, replies, url = row
        try:
            posted_at = parse_date(raw_date)
        except ValueError:
            raise MalformedRow(line, f"bad date {raw_date!r}", source) from None
        posts.append(
            ForumPost(
                post_id=post_id,
                posted_at=posted_at,
                text=text,
                read_count=_parse_count(reads, line, source),
                reply_count=_parse_count(replies, line, source),
                source_url=url,
            )
        )
    if not posts:
        raise EmptyInput(f"{source or 'posts input'}: no data rows")
    return posts


def write_posts(posts: Iterable[ForumPost], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CLEAN_HEADER)
    for p in posts:
        w.writerow([p.post_id, p.posted_at.isoformat(), p.text, p.read_count, p.reply_count, p.source_url])


# --- cleaning -------------------------------------------------------------

_TAG_RE = re.compile(r"<[^<>]*>")
_EMOJI_RE = re.compile(
    "["
    "\U0001F000-\U0001FAFF"  # mahjong .. symbols & pictographs extended-A
    "\U00002600-\U000027BF"  # misc symbols, dingbats
    "\U00002B00-\U00002BFF"  # misc symbols and arrows (stars, squares)
    "\U0000FE00-\U0000FE0F"  # variation selectors
    "\U0000200D"             # zero width joiner
    "\U000020E3"             # combining enclosing keycap
    "\U000E0020-\U000E007F"  # tag sequence characters
    "]"
)
_CTRL_RE = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f-\x9f\ufeff]")
_WS_RE = re.compile(r"\s+")


def _clean_once(text: str) -> str:
    text = _TAG_RE.sub("", text)
    text = _EMOJI_RE.sub("", text)
    text = _CTRL_RE.sub("", text)
    return _WS_RE.sub(" ", text).strip()


def clean_string(text: str) -> str:
    # Removing one span can expose another ("<<b>b>"), so iterate to a fixed point.
    while True:
        cleaned = _clean_once(text)
        if cleaned == text:
            return cleaned
        text = cleaned


def clean_text(post: ForumPost) -> ForumPost:
    """Strip HTML tags, emoji and control characters; collapse whitespace."""
    return replace(post, text=clean_string(post.text))


def deduplicate(posts: Sequence[ForumPost]) -> list[ForumPost]:
    """Keep the first post for every ``(date, text)`` key."""
    seen: set[tuple[date, str]] = set()
    out = []
    for p in posts:
        key = (p.posted_at, p.text)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def filter_by_length(posts: Sequence[ForumPost], cfg: CorpusFilterConfig = CorpusFilterConfig()) -> list[ForumPost]:
    return [p for p in posts if len(p.text) < cfg.max_chars]


def select_daily_top(posts: Sequence[ForumPost], cfg: CorpusFilterConfig = CorpusFilterConfig()) -> list[ForumPost]:
    """Per date, the ``top_per_day`` most-read posts; input order breaks ties.

    Output is grouped by ascending date, most-read first within a date.
    """
    by_day: dict[date, list[tuple[int, ForumPost]]] = defaultdict(list)
    for i, p in enumerate(posts):
        by_day[p.posted_at].append((i, p))
    out = []
    for day in sorted(by_day):
        ranked = sorted(by_day[day], key=lambda ip: (-ip[1].read_count, ip[0]))
        out.extend(p for _, p in ranked[: cfg.top_per_day])
    return out


def preprocess(posts: Sequence[ForumPost], cfg: CorpusFilterConfig = CorpusFilterConfig()) -> list[ForumPost]:
    """clean -> dedup -> length filter -> daily top-N."""
    cleaned = [clean_text(p) for p in posts]
    return select_daily_top(filter_by_length(deduplicate(cleaned), cfg), cfg)
