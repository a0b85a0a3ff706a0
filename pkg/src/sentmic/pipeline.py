"""End-to-end orchestration: ingest -> score -> index -> align -> smooth -> MIC.

Each stage reads and writes files so it can be re-run alone; ``run_pipeline``
chains the same stage functions the CLI subcommands call, which is what
makes a subcommand chain reproduce a single-shot run exactly.
"""

from __future__ import annotations

import hashlib
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CorpusFilterConfig, ForumPost, parse_posts, preprocess, write_posts
from .errors import ConfigError, IoFailure, MissingScore, SentmicError
from .mic import CharacteristicMatrix, MicConfig, MicResult, mic
from .report import AnalysisReport, emit_report
from .sentiment import (
    DailyIndexPoint,
    ScoredPost,
    daily_index,
    load_external_scores,
    load_lexicon,
    read_index,
    read_scores,
    score_with_lexicon,
    write_index,
    write_scores,
)
from .series import (
    AlignedSeries,
    AlignPolicy,
    Series,
    align_series,
    close_series,
    load_price_bars,
    rolling_mean,
    write_pairs,
)
from .stats import compute_series_stats

log = logging.getLogger(__name__)

CLEAN_POSTS = "posts_clean.csv"
SCORES = "scores.csv"
INDEX = "index.csv"
PAIRS = "pairs.csv"
MIN_MIC_POINTS = 4


@dataclass
class PipelineConfig:
    posts_path: Path
    prices_path: Path
    output_dir: Path
    lexicon_path: Path | None = None
    probs_path: Path | None = None
    filter: CorpusFilterConfig = field(default_factory=CorpusFilterConfig)
    window: int = 30
    min_obs: int = 1
    align_policy: AlignPolicy = AlignPolicy.NEXT_TRADING_DAY
    mic: MicConfig = field(default_factory=MicConfig)

    def __post_init__(self):
        if (self.lexicon_path is None) == (self.probs_path is None):
            raise ConfigError("configure exactly one of lexicon_path, probs_path")
        for name in ("posts_path", "prices_path", "output_dir"):
            if not str(getattr(self, name) or ""):
                raise ConfigError(f"{name} must be set")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if not 1 <= self.min_obs <= self.window:
            raise ConfigError("min_obs must be in [1, window]")
        self.align_policy = AlignPolicy(self.align_policy)

    def echo(self) -> dict:
        """Config as recorded in the report; the output location is left out
        so identical runs into different directories produce identical reports."""
        return {
            "posts_path": str(self.posts_path),
            "prices_path": str(self.prices_path),
            "lexicon_path": None if self.lexicon_path is None else str(self.lexicon_path),
            "probs_path": None if self.probs_path is None else str(self.probs_path),
            "filter": {"max_chars": self.filter.max_chars, "top_per_day": self.filter.top_per_day},
            "window": self.window,
            "min_obs": self.min_obs,
            "align_policy": self.align_policy.value,
            "mic": {"alpha": self.mic.alpha, "min_b": self.mic.min_b,
                    "clumping_factor": self.mic.clumping_factor},
        }


_PATH_KEYS = {"posts_path", "prices_path", "lexicon_path", "probs_path", "output_dir"}
_INT_KEYS = {"window", "min_obs", "filter.max_chars", "filter.top_per_day", "mic.min_b", "mic.clumping_factor"}
_FLOAT_KEYS = {"mic.alpha"}
_KEYS = _PATH_KEYS | _INT_KEYS | _FLOAT_KEYS | {"align_policy"}


def load_config(path, defaults: dict | None = None, **overrides) -> PipelineConfig:
    """Parse a ``key = value`` config file (``#`` starts a comment).

    Nested fields use dotted keys (``filter.max_chars``, ``mic.alpha``).
    Relative paths resolve against the config file's directory. File values
    win over ``defaults``; keyword ``overrides`` win over both.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    raw: dict[str, str] = {k: str(v) for k, v in (defaults or {}).items() if v is not None}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown or malformed entry {line!r}")
        raw[key] = value
    raw.update({k: str(v) for k, v in overrides.items() if v is not None})

    base = path.parent
    kwargs: dict = {}
    missing = {"posts_path", "prices_path", "output_dir"} - raw.keys()
    if missing:
        raise ConfigError(f"{path}: missing {', '.join(sorted(missing))}")
    try:
        for key in _PATH_KEYS & raw.keys():
            p = Path(raw[key])
            kwargs[key] = p if p.is_absolute() else base / p
        for key in ("window", "min_obs"):
            if key in raw:
                kwargs[key] = int(raw[key])
        if "align_policy" in raw:
            kwargs["align_policy"] = AlignPolicy(raw["align_policy"])
        filt = {k.split(".", 1)[1]: int(v) for k, v in raw.items() if k.startswith("filter.")}
        kwargs["filter"] = CorpusFilterConfig(**filt)
        mic_kw = {}
        for k, v in raw.items():
            if k.startswith("mic."):
                name = k.split(".", 1)[1]
                mic_kw[name] = float(v) if name == "alpha" else int(v)
        kwargs["mic"] = MicConfig(**mic_kw)
        return PipelineConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@contextmanager
def stage(name: str):
    """Tag any library error raised inside with the stage name."""
    try:
        yield
    except SentmicError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def _open_read(path):
    try:
        return open(path, "rb")
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc


def _open_write(path):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise IoFailure(path, exc.strerror or str(exc)) from exc


def sha256_file(path) -> str:
    with _open_read(path) as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# --- stages -------------------------------------------------------------

def stage_ingest(posts_path, out_path, cfg: CorpusFilterConfig = CorpusFilterConfig()) -> list[ForumPost]:
    with stage("ingest"):
        with _open_read(posts_path) as fh:
            posts = parse_posts(fh, source=str(posts_path))
        kept = preprocess(posts, cfg)
        with _open_write(out_path) as out:
            write_posts(kept, out)
        log.info("ingest: %d raw posts -> %d kept", len(posts), len(kept))
        return kept


def stage_score(clean_path, out_path, lexicon_path=None, probs_path=None) -> list[ScoredPost]:
    if (lexicon_path is None) == (probs_path is None):
        raise ConfigError("score needs exactly one of a lexicon or a probabilities file")
    with stage("score"):
        with _open_read(clean_path) as fh:
            posts = parse_posts(fh, source=str(clean_path))
        if lexicon_path is not None:
            with _open_read(lexicon_path) as fh:
                lexicon = load_lexicon(fh, source=str(lexicon_path))
            scored = [ScoredPost(p.post_id, p.posted_at, score_with_lexicon(p.text, lexicon)) for p in posts]
        else:
            with _open_read(probs_path) as fh:
                table = load_external_scores(fh, source=str(probs_path))
            scored = []
            for p in posts:
                if p.post_id not in table:
                    raise MissingScore(p.post_id)
                scored.append(ScoredPost(p.post_id, p.posted_at, table[p.post_id]))
        with _open_write(out_path) as out:
            write_scores(scored, out)
        return scored


def stage_index(scores_path, out_path) -> list[DailyIndexPoint]:
    with stage("index"):
        with _open_read(scores_path) as fh:
            scored = read_scores(fh, source=str(scores_path))
        points = daily_index([s.as_post_sentiment() for s in scored])
        with _open_write(out_path) as out:
            write_index(points, out)
        return points


def align_index(points: list[DailyIndexPoint], prices: Series, policy) -> AlignedSeries:
    sentiment = Series("sentiment", [p.date for p in points], [p.emotions for p in points])
    return align_series(sentiment, prices, policy, weights=[p.n_posts for p in points])


def stage_align(index_path, prices_path, out_path, policy=AlignPolicy.NEXT_TRADING_DAY) -> AlignedSeries:
    with stage("align"):
        with _open_read(index_path) as fh:
            points = read_index(fh, source=str(index_path))
        with _open_read(prices_path) as fh:
            prices = close_series(load_price_bars(fh, source=str(prices_path)))
        aligned = align_index(points, prices, policy)
        if out_path is not None:
            with _open_write(out_path) as out:
                write_pairs(aligned, out)
        return aligned


def analyze(aligned: AlignedSeries, window: int = 30, min_obs: int = 1,
            mic_cfg: MicConfig = MicConfig(), threads: int = 1,
            config: dict | None = None, inputs: dict | None = None) -> AnalysisReport:
    """Smooth both aligned series, then MIC between the smoothed pair."""
    with stage("analyze"):
        avg_sent = rolling_mean(aligned.sentiment_series(), window, min_obs)
        avg_price = rolling_mean(aligned.price_series(), window, min_obs)
        if len(avg_sent) >= MIN_MIC_POINTS:
            result = mic(avg_sent.values, avg_price.values, mic_cfg, threads=threads)
        else:
            # too short for any grid; still report and chart what there is
            log.warning("analyze: %d points, MIC needs %d; reporting a degenerate result",
                        len(avg_sent), MIN_MIC_POINTS)
            result = MicResult(0.0, 0, 0, CharacteristicMatrix({}), len(avg_sent), mic_cfg.alpha, degenerate=True)
        stats = {
            "sentiment": compute_series_stats(aligned.sentiment),
            "price": compute_series_stats(aligned.price),
            "avg_sentiment": compute_series_stats(avg_sent.values),
            "avg_price": compute_series_stats(avg_price.values),
        }
        return AnalysisReport(result, stats, aligned, avg_sent, avg_price,
                              config=config or {}, inputs=inputs or {})


def stage_analyze(index_path, prices_path, out_dir, policy=AlignPolicy.NEXT_TRADING_DAY, window=30,
                  min_obs=1, mic_cfg: MicConfig = MicConfig(), threads=1, config=None, inputs=None) -> AnalysisReport:
    out_dir = Path(out_dir)
    aligned = stage_align(index_path, prices_path, out_dir / PAIRS, policy)
    if config is None:
        config = {"window": window, "min_obs": min_obs, "align_policy": AlignPolicy(policy).value,
                  "mic": {"alpha": mic_cfg.alpha, "min_b": mic_cfg.min_b,
                          "clumping_factor": mic_cfg.clumping_factor}}
    if inputs is None:
        inputs = {"index_sha256": sha256_file(index_path), "prices_sha256": sha256_file(prices_path)}
    report = analyze(aligned, window, min_obs, mic_cfg, threads, config, inputs)
    with stage("report"):
        emit_report(report, out_dir)
    return report


def run_pipeline(cfg: PipelineConfig, threads: int = 1) -> AnalysisReport:
    out = Path(cfg.output_dir)
    stage_ingest(cfg.posts_path, out / CLEAN_POSTS, cfg.filter)
    stage_score(out / CLEAN_POSTS, out / SCORES, cfg.lexicon_path, cfg.probs_path)
    stage_index(out / SCORES, out / INDEX)
    inputs = {"posts_sha256": sha256_file(cfg.posts_path), "prices_sha256": sha256_file(cfg.prices_path)}
    scorer = cfg.lexicon_path if cfg.lexicon_path is not None else cfg.probs_path
    inputs["lexicon_sha256" if cfg.lexicon_path is not None else "probs_sha256"] = sha256_file(scorer)
    return stage_analyze(out / INDEX, cfg.prices_path, out, cfg.align_policy, cfg.window, cfg.min_obs,
                         cfg.mic, threads, config=cfg.echo(), inputs=inputs)
