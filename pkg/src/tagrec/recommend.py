"""Scoring and top-K hashtag recommendation for unseen tweets.

A tweet is embedded as the average of its in-vocabulary token vectors and
compared against each candidate hashtag's vector by cosine similarity.
With the per-hashtag model the tweet is re-embedded inside each hashtag's
private space; with the global model it is embedded exactly once. The
top-K list is restricted to hashtags that co-occur with the best match in
training tweets, unless global ranking is requested.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import CleanTweet
from .errors import UnscorableTweetError
from .models import MODEL1, Model1, Model2
from .skipgram import EmbeddingModel, cosine


@dataclass
class Recommendation:
    tweet_id: str
    best: str | None
    ranked: list[tuple[str, float]]
    coverage: float

    @property
    def scorable(self) -> bool:
        return self.best is not None


@dataclass
class Instrumentation:
    """Counts tweet-averaging operations, to pin the algorithmic shape."""

    averaging_calls: int = 0

    def reset(self) -> None:
        self.averaging_calls = 0


instrumentation = Instrumentation()


def _tweet_vector(model: EmbeddingModel, tokens: list[str]) -> np.ndarray | None:
    """Occurrence-weighted mean of the tokens found in `model`'s vocabulary."""
    instrumentation.averaging_calls += 1
    index = model.vocabulary.index
    total = np.zeros(model.dim, dtype=np.float64)
    found = 0
    for tok in tokens:
        i = index.get(tok)
        if i is not None:
            total += model.vectors[i]
            found += 1
    if found == 0:
        return None
    return total / found


def score_model1(model: Model1, tweet: CleanTweet) -> dict[str, float]:
    """Per-hashtag scores, each computed inside that hashtag's own space.

    Hashtags sharing no vocabulary with the tweet are omitted; an empty
    result raises UnscorableTweetError.
    """
    scores: dict[str, float] = {}
    for tag, emb in model.embeddings.items():
        tag_vector = model.hashtag_vectors.get(tag)
        if tag_vector is None:
            continue
        tweet_vector = _tweet_vector(emb, tweet.tokens)
        if tweet_vector is None:
            continue
        scores[tag] = cosine(tag_vector, tweet_vector)
    if not scores:
        raise UnscorableTweetError(f"tweet {tweet.id}: no hashtag shares its vocabulary")
    return scores


def score_model2(model: Model2, tweet: CleanTweet) -> dict[str, float]:
    """Scores against every hashtag vector, with one global tweet embedding."""
    tweet_vector = _tweet_vector(model.global_model, tweet.tokens)
    if tweet_vector is None:
        raise UnscorableTweetError(f"tweet {tweet.id}: no token in the global vocabulary")
    return {
        tag: cosine(vec, tweet_vector)
        for tag, vec in model.hashtag_vectors.items()
        if vec is not None
    }


def coverage(model: Model1 | Model2, tweet: CleanTweet) -> float:
    """Fraction of the tweet's tokens found in the scoring vocabulary.

    For the global model that is its vocabulary; for the per-hashtag model,
    the union of the scorable hashtags' vocabularies.
    """
    if not tweet.tokens:
        return 0.0
    if model.kind == MODEL1:
        vocabularies = [
            emb.vocabulary
            for tag, emb in model.embeddings.items()
            if model.hashtag_vectors.get(tag) is not None
        ]
        found = sum(1 for tok in tweet.tokens if any(tok in v for v in vocabularies))
    else:
        vocab = model.global_model.vocabulary
        found = sum(1 for tok in tweet.tokens if tok in vocab)
    return found / len(tweet.tokens)


def expansion_set(model: Model1 | Model2, best: str) -> set[str]:
    """Hashtags of all training tweets that contain `best` (incl. itself)."""
    return set(model.cooccurrence.get(best, ())) | {best}


def recommend(
    model: Model1 | Model2, tweet: CleanTweet, k: int, rank_all: bool = False
) -> Recommendation:
    """Rank the top-k hashtags for one tweet.

    The winner g is the argmax of the score map (lexicographic tie-break).
    For k > 1 the candidate pool is g's co-occurrence expansion; scored
    members come first by descending score, then unscored members in
    lexicographic order with a reported score of 0. With `rank_all` the
    pool is every scored hashtag instead.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = score_model1(model, tweet) if model.kind == MODEL1 else score_model2(model, tweet)
    by_rank = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    best = by_rank[0][0]
    cov = coverage(model, tweet)

    if k == 1:
        ranked = [by_rank[0]]
    elif rank_all:
        ranked = by_rank[:k]
    else:
        pool = expansion_set(model, best)
        ranked = [(tag, s) for tag, s in by_rank if tag in pool][:k]
        if len(ranked) < k:
            padding = sorted(t for t in pool if t not in scores)
            ranked.extend((tag, 0.0) for tag in padding[: k - len(ranked)])
    return Recommendation(tweet_id=tweet.id, best=best, ranked=ranked, coverage=cov)


def recommend_batch(
    model: Model1 | Model2,
    tweets: list[CleanTweet],
    k_for,
    rank_all: bool = False,
) -> list[Recommendation]:
    """Recommend for every tweet; unscorable tweets become empty records.

    `k_for` maps a CleanTweet to its k (e.g. always 1, or the size of its
    ground-truth hashtag set).
    """
    out: list[Recommendation] = []
    for tweet in tweets:
        if not tweet.tokens:
            out.append(Recommendation(tweet.id, None, [], 0.0))
            continue
        try:
            out.append(recommend(model, tweet, k_for(tweet), rank_all=rank_all))
        except UnscorableTweetError:
            out.append(Recommendation(tweet.id, None, [], coverage(model, tweet)))
    return out


def write_recommendations_jsonl(path: str | Path, recs: list[Recommendation]) -> None:
    """One record per tweet; scores carry 6 decimal places."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in recs:
            fh.write(
                json.dumps(
                    {
                        "id": rec.tweet_id,
                        "best": rec.best,
                        "ranked": [[tag, round(score, 6)] for tag, score in rec.ranked],
                        "coverage": round(rec.coverage, 6),
                    }
                )
                + "\n"
            )
