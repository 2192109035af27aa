"""Corpus ingestion, cleaning, frequency filtering, and splitting.

Input is raw microblog posts (JSON Lines); output is cleaned tweets with
normalized content tokens plus their hashtag sets, filtered by hashtag
frequency and partitioned into deterministic train/validation/test splits.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import porter2
from .errors import DataError

HASHTAG_RE = re.compile(r"#[A-Za-z0-9_]+")
MENTION_RE = re.compile(r"@[A-Za-z0-9_]+")

# Reasons a raw tweet is dropped, in the order the rules are applied.
DROP_NOT_ENGLISH = "not_english"
DROP_RETWEET_OR_QUOTE = "retweet_or_quote"
DROP_NO_HASHTAG = "no_hashtag"
DROP_STOPWORD_HASHTAGS = "stopword_hashtags_only"


@dataclass
class RawTweet:
    id: str
    text: str
    lang: str = "en"
    is_retweet: bool = False
    is_quote: bool = False


@dataclass
class CleanTweet:
    id: str
    tokens: list[str]
    hashtags: set[str]


@dataclass
class PipelineConfig:
    min_hashtag_freq: int = 200
    max_hashtag_freq: int = 500
    stopwords: set[str] = field(default_factory=lambda: default_stopwords())
    slang: dict[str, str] = field(default_factory=lambda: default_slang())
    split_ratios: tuple[float, float, float] = (0.7, 0.1, 0.2)
    seed: int = 0

    def __post_init__(self):
        if self.min_hashtag_freq < 1 or self.max_hashtag_freq < self.min_hashtag_freq:
            raise DataError(
                "hashtag frequency bounds must satisfy 1 <= min <= max, got "
                f"[{self.min_hashtag_freq}, {self.max_hashtag_freq}]"
            )
        if len(self.split_ratios) != 3 or any(r < 0 for r in self.split_ratios):
            raise DataError(f"split_ratios must be three non-negative numbers: {self.split_ratios}")
        if abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise DataError(f"split_ratios must sum to 1: {self.split_ratios}")

    def content_hash(self) -> str:
        """Hash of everything that influences preprocessing output."""
        payload = {
            "min_hashtag_freq": self.min_hashtag_freq,
            "max_hashtag_freq": self.max_hashtag_freq,
            "stopwords": sorted(self.stopwords),
            "slang": sorted(self.slang.items()),
            "split_ratios": list(self.split_ratios),
            "seed": self.seed,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class CorpusSplit:
    train: list[CleanTweet]
    validation: list[CleanTweet]
    test: list[CleanTweet]
    seed: int


def default_stopwords() -> set[str]:
    text = resources.files("tagrec.data").joinpath("stopwords.txt").read_text()
    return {line.strip() for line in text.splitlines() if line.strip()}


def default_slang() -> dict[str, str]:
    text = resources.files("tagrec.data").joinpath("slang.tsv").read_text()
    return _parse_slang(text.splitlines())


def load_stopwords(path: str | Path) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


def load_slang(path: str | Path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return _parse_slang(fh)


def _parse_slang(lines) -> dict[str, str]:
    mapping = {}
    for line in lines:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if "\t" not in line:
            raise DataError(f"slang dictionary line is not tab-separated: {line!r}")
        slang, expansion = line.split("\t", 1)
        mapping[slang.strip().lower()] = expansion.strip().lower()
    return mapping


def extract_hashtags(text: str) -> tuple[str, set[str]]:
    """Pull hashtags out of `text`.

    Returns the text with hashtags and @-mentions deleted, plus the set of
    hashtag strings (lowercased, '#' stripped, deduplicated).
    """
    hashtags = {m.group()[1:].lower() for m in HASHTAG_RE.finditer(text)}
    content = MENTION_RE.sub("", HASHTAG_RE.sub("", text))
    return content, hashtags


def content_tokens(content_text: str, cfg: PipelineConfig) -> list[str]:
    """Run hashtag-free text through the token-normalization stages.

    Whitespace tokenization, removal of leftover '#'/'@' fragments,
    lowercasing, whole-token slang expansion (expansions re-tokenized),
    stopword removal, then stemming.
    """
    tokens = [t.lower() for t in content_text.split() if not t.startswith(("#", "@"))]
    expanded: list[str] = []
    for tok in tokens:
        if tok in cfg.slang:
            expanded.extend(cfg.slang[tok].split())
        else:
            expanded.append(tok)
    return [porter2.stem(t) for t in expanded if t not in cfg.stopwords]


def clean_verbose(raw: RawTweet, cfg: PipelineConfig) -> tuple[CleanTweet | None, str | None]:
    """Clean one tweet, reporting which drop rule fired (if any)."""
    if raw.lang != "en":
        return None, DROP_NOT_ENGLISH
    if raw.is_retweet or raw.is_quote:
        return None, DROP_RETWEET_OR_QUOTE
    text = raw.text.encode("ascii", "ignore").decode("ascii")
    content, hashtags = extract_hashtags(text)
    if not hashtags:
        return None, DROP_NO_HASHTAG
    hashtags = {h for h in hashtags if h not in cfg.stopwords}
    if not hashtags:
        return None, DROP_STOPWORD_HASHTAGS
    return CleanTweet(id=raw.id, tokens=content_tokens(content, cfg), hashtags=hashtags), None


def clean(raw: RawTweet, cfg: PipelineConfig) -> CleanTweet | None:
    """Clean one tweet; None when a drop rule fires."""
    return clean_verbose(raw, cfg)[0]


def filter_by_hashtag_frequency(
    tweets: list[CleanTweet], cfg: PipelineConfig
) -> list[CleanTweet]:
    """Keep tweets with at least one hashtag whose corpus count is in range.

    Counts are per tweet (a hashtag is a set member, so one tweet counts a
    tag once), taken over the input corpus. Retained tweets keep all their
    hashtags, including out-of-range ones.
    """
    counts = hashtag_counts(tweets)
    lo, hi = cfg.min_hashtag_freq, cfg.max_hashtag_freq
    return [t for t in tweets if any(lo <= counts[h] <= hi for h in t.hashtags)]


def hashtag_counts(tweets: list[CleanTweet]) -> Counter:
    counts: Counter = Counter()
    for t in tweets:
        counts.update(t.hashtags)
    return counts


def split_corpus(tweets: list[CleanTweet], cfg: PipelineConfig) -> CorpusSplit:
    """Deterministic seeded shuffle, then cut at the ratio boundaries.

    Train and validation sizes are floored; the remainder is the test set.
    """
    if not tweets:
        raise DataError("cannot split an empty corpus")
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(tweets))
    shuffled = [tweets[i] for i in order]
    n = len(tweets)
    n_train = int(n * cfg.split_ratios[0])
    n_val = int(n * cfg.split_ratios[1])
    return CorpusSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
        seed=cfg.seed,
    )


def run_pipeline(
    raws: list[RawTweet], cfg: PipelineConfig, n_malformed: int = 0
) -> tuple[CorpusSplit, dict]:
    """Clean, frequency-filter, and split; also report per-stage counts.

    The funnel dict mirrors the selection stages: surviving counts after
    each drop rule, then the filtered total and the three split sizes.
    """
    total = len(raws) + n_malformed
    cleaned: list[CleanTweet] = []
    drops: Counter = Counter()
    seen_ids: set[str] = set()
    n_duplicates = 0
    for raw in raws:
        if not raw.id or raw.id in seen_ids:
            n_duplicates += 1
            continue
        seen_ids.add(raw.id)
        tweet, reason = clean_verbose(raw, cfg)
        if tweet is None:
            drops[reason] += 1
        else:
            cleaned.append(tweet)

    n_malformed += n_duplicates
    parsed = total - n_malformed
    english = parsed - drops[DROP_NOT_ENGLISH]
    original = english - drops[DROP_RETWEET_OR_QUOTE]
    with_hashtag = original - drops[DROP_NO_HASHTAG] - drops[DROP_STOPWORD_HASHTAGS]

    filtered = filter_by_hashtag_frequency(cleaned, cfg)
    if not filtered:
        raise DataError("no tweets survive the hashtag-frequency filter")
    split = split_corpus(filtered, cfg)

    funnel = {
        "total_records": total,
        "malformed_records": n_malformed,
        "english": english,
        "original_content": original,
        "with_hashtag": with_hashtag,
        "frequency_filtered": len(filtered),
        "train": len(split.train),
        "validation": len(split.validation),
        "test": len(split.test),
    }
    return split, funnel


def read_raw_jsonl(path: str | Path) -> tuple[list[RawTweet], int]:
    """Read raw tweets; malformed records are counted and skipped."""
    raws: list[RawTweet] = []
    n_errors = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                raw = RawTweet(
                    id=obj["id"],
                    text=obj["text"],
                    lang=obj["lang"],
                    is_retweet=bool(obj.get("is_retweet", False)),
                    is_quote=bool(obj.get("is_quote", False)),
                )
                if not isinstance(raw.id, str) or not isinstance(raw.text, str) or not raw.id:
                    raise ValueError("bad field types")
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                n_errors += 1
                continue
            raws.append(raw)
    return raws, n_errors


def write_clean_jsonl(path: str | Path, tweets: list[CleanTweet]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(
                json.dumps(
                    {"id": t.id, "tokens": t.tokens, "hashtags": sorted(t.hashtags)},
                    sort_keys=True,
                )
                + "\n"
            )


def read_clean_jsonl(path: str | Path) -> list[CleanTweet]:
    tweets: list[CleanTweet] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                tweets.append(
                    CleanTweet(id=obj["id"], tokens=list(obj["tokens"]), hashtags=set(obj["hashtags"]))
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"malformed clean-tweet record in {path}: {line!r}") from exc
    return tweets
