"""Per-post sentiment scoring and the daily sentiment index.

A scorer maps cleaned text to a (negative, neutral, positive) probability
triple. Two scorers ship: a weighted lexicon, and a loader for probabilities
produced elsewhere (e.g. by a fine-tuned classifier).
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date
from enum import IntEnum
from typing import IO, Iterable, Mapping, Sequence

from .corpus import _as_text, parse_date
from .errors import BadProbabilityRow, DuplicatePostId, EmptyInput, EmptyLexicon, MalformedRow

SUM_TOL = 1e-9
RENORM_TOL = 1e-6

PROBS_HEADER = ["post_id", "p_neg", "p_neu", "p_pos"]
SCORES_HEADER = ["post_id", "date", "p_neg", "p_neu", "p_pos", "label", "sentiment"]
INDEX_HEADER = ["date", "emotions", "n_posts"]


class Label(IntEnum):
    NEGATIVE = 0
    NEUTRAL = 1
    POSITIVE = 2


def argmax_label(p_negative: float, p_neutral: float, p_positive: float) -> Label:
    """Class with the largest probability; any tie at the top resolves to Neutral."""
    top = max(p_negative, p_neutral, p_positive)
    winners = [lab for lab, p in zip(Label, (p_negative, p_neutral, p_positive)) if p == top]
    if len(winners) > 1:
        return Label.NEUTRAL
    return winners[0]


@dataclass(frozen=True)
class SentimentScore:
    p_negative: float
    p_neutral: float
    p_positive: float
    label: Label = field(default=None)  # derived when omitted

    def __post_init__(self):
        probs = (self.p_negative, self.p_neutral, self.p_positive)
        if not all(0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"probabilities outside [0, 1]: {probs}")
        if abs(math.fsum(probs) - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities do not sum to 1: {probs}")
        derived = argmax_label(*probs)
        if self.label is None:
            object.__setattr__(self, "label", derived)
        elif Label(self.label) != derived:
            raise ValueError(f"label {self.label} is not the argmax of {probs}")
        else:
            object.__setattr__(self, "label", Label(self.label))

    @classmethod
    def from_unnormalized(cls, p_negative: float, p_neutral: float, p_positive: float,
                          tol: float = RENORM_TOL) -> "SentimentScore":
        """Renormalize a triple whose sum is within ``tol`` of 1."""
        total = math.fsum((p_negative, p_neutral, p_positive))
        if abs(total - 1.0) > tol:
            raise ValueError(f"sum {total!r} deviates from 1 by more than {tol}")
        return cls(p_negative / total, p_neutral / total, p_positive / total)

    @property
    def sentiment(self) -> float:
        return post_sentiment(self.p_positive, self.p_negative)


@dataclass(frozen=True)
class PostSentiment:
    post_id: str
    posted_at: date
    value: float


@dataclass(frozen=True)
class DailyIndexPoint:
    date: date
    emotions: float
    n_posts: int


def post_sentiment(p_positive: float, p_negative: float) -> float:
    """Score of one post: P(positive) - P(negative), in [-1, 1]."""
    return p_positive + (-1.0) * p_negative


# --- lexicon scorer --------------------------------------------------------

@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[str, float]
    neutral_bias: float = 0.0

    def __post_init__(self):
        for term, w in self.entries.items():
            if not term:
                raise ValueError("lexicon contains an empty term")
            if not math.isfinite(w):
                raise ValueError(f"non-finite weight for {term!r}")
        if not math.isfinite(self.neutral_bias):
            raise ValueError("non-finite neutral_bias")
        object.__setattr__(self, "entries", dict(self.entries))
        # longest terms first, so forward maximum matching can stop at the first hit
        object.__setattr__(self, "_lengths", sorted({len(t) for t in self.entries}, reverse=True))


def load_lexicon(stream, source: str | None = None) -> Lexicon:
    """Lexicon CSV: ``term,weight`` rows, optionally preceded by
    ``# neutral_bias = <float>`` comment lines."""
    text = _as_text(stream).read()
    bias = 0.0
    body = []
    for raw in text.splitlines(keepends=True):
        stripped = raw.strip()
        if not body and stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").partition("=")
            if key.strip() == "neutral_bias":
                bias = float(value)
            continue
        body.append(raw)
    reader = csv.reader(io.StringIO("".join(body)))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["term", "weight"]:
        raise MalformedRow(1, f"expected header term,weight, got {header!r}", source)
    entries = {}
    for row in reader:
        if not row:
            continue
        if len(row) != 2:
            raise MalformedRow(reader.line_num, "expected 2 columns", source)
        try:
            entries[row[0]] = float(row[1])
        except ValueError:
            raise MalformedRow(reader.line_num, f"bad weight {row[1]!r}", source) from None
    return Lexicon(entries, bias)


def match_terms(text: str, lexicon: Lexicon) -> list[str]:
    """Forward maximum matching: at each position take the longest term that
    starts there, consume it, and continue after it."""
    found = []
    i, n = 0, len(text)
    entries = lexicon.entries
    while i < n:
        for length in lexicon._lengths:
            if i + length <= n and text[i:i + length] in entries:
                found.append(text[i:i + length])
                i += length
                break
        else:
            i += 1
    return found


def score_with_lexicon(text: str, lexicon: Lexicon) -> SentimentScore:
    if not lexicon.entries:
        raise EmptyLexicon("lexicon has no entries")
    w_pos = w_neg = 0.0
    for term in match_terms(text, lexicon):
        w = lexicon.entries[term]
        if w > 0:
            w_pos += w
        elif w < 0:
            w_neg += -w
    logits = (w_neg, lexicon.neutral_bias, w_pos)
    top = max(logits)
    exps = [math.exp(v - top) for v in logits]
    total = math.fsum(exps)
    return SentimentScore(*(e / total for e in exps))


# --- external probabilities -----------------------------------------------

def load_external_scores(stream, source: str | None = None) -> dict[str, SentimentScore]:
    reader = csv.reader(_as_text(stream))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != PROBS_HEADER:
        raise MalformedRow(1, f"expected header {','.join(PROBS_HEADER)}, got {header!r}", source)
    scores: dict[str, SentimentScore] = {}
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise MalformedRow(line, "expected 4 columns", source)
        post_id = row[0].strip()
        try:
            probs = [float(v) for v in row[1:]]
        except ValueError:
            raise BadProbabilityRow(line, f"unparseable value in {row[1:]!r}", source) from None
        if not all(0.0 <= p <= 1.0 for p in probs):
            raise BadProbabilityRow(line, f"value outside [0, 1] in {row[1:]!r}", source)
        try:
            score = SentimentScore.from_unnormalized(*probs)
        except ValueError as exc:
            raise BadProbabilityRow(line, str(exc), source) from None
        if post_id in scores:
            raise DuplicatePostId(post_id, source)
        scores[post_id] = score
    return scores


def write_probabilities(scores: Mapping[str, SentimentScore], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PROBS_HEADER)
    for post_id, s in scores.items():
        w.writerow([post_id, repr(s.p_negative), repr(s.p_neutral), repr(s.p_positive)])


# --- scored posts and daily index -----------------------------------------

@dataclass(frozen=True)
class ScoredPost:
    post_id: str
    posted_at: date
    score: SentimentScore

    def as_post_sentiment(self) -> PostSentiment:
        return PostSentiment(self.post_id, self.posted_at, self.score.sentiment)


def write_scores(scored: Iterable[ScoredPost], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SCORES_HEADER)
    for sp in scored:
        s = sp.score
        w.writerow([sp.post_id, sp.posted_at.isoformat(), repr(s.p_negative), repr(s.p_neutral),
                    repr(s.p_positive), int(s.label), repr(s.sentiment)])


def read_scores(stream, source: str | None = None) -> list[ScoredPost]:
    reader = csv.reader(_as_text(stream))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != SCORES_HEADER:
        raise MalformedRow(1, f"expected header {','.join(SCORES_HEADER)}", source)
    out = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(SCORES_HEADER):
            raise MalformedRow(reader.line_num, "wrong column count", source)
        try:
            score = SentimentScore(float(row[2]), float(row[3]), float(row[4]), Label(int(row[5])))
            out.append(ScoredPost(row[0], parse_date(row[1]), score))
        except ValueError as exc:
            raise MalformedRow(reader.line_num, str(exc), source) from None
    return out


def daily_index(sentiments: Sequence[PostSentiment]) -> list[DailyIndexPoint]:
    """Mean post sentiment per calendar date, ascending by date."""
    by_day: dict[date, list[float]] = defaultdict(list)
    for s in sentiments:
        by_day[s.posted_at].append(s.value)
    points = []
    for day in sorted(by_day):
        values = by_day[day]
        mean = math.fsum(values) / len(values)
        # a correctly rounded sum can still land a hair outside the sample range
        mean = min(max(mean, min(values)), max(values))
        points.append(DailyIndexPoint(day, mean, len(values)))
    return points


def write_index(points: Iterable[DailyIndexPoint], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(INDEX_HEADER)
    for p in points:
        w.writerow([p.date.isoformat(), repr(p.emotions), p.n_posts])


def read_index(stream, source: str | None = None) -> list[DailyIndexPoint]:
    reader = csv.reader(_as_text(stream))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != INDEX_HEADER:
        raise MalformedRow(1, f"expected header {','.join(INDEX_HEADER)}", source)
    out = []
    for row in reader:
        if not row:
            continue
        try:
            out.append(DailyIndexPoint(parse_date(row[0]), float(row[1]), int(row[2])))
        except (ValueError, IndexError) as exc:
            raise MalformedRow(reader.line_num, str(exc), source) from None
    if not out:
        raise EmptyInput(f"{source or 'index input'}: no data rows")
    return out
