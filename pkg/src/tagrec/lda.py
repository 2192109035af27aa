"""Latent Dirichlet Allocation baseline via collapsed Gibbs sampling.

Used as the reference recommender that headline scores are lifted against:
train a topic model on the training tweets, fold a test tweet in to get
its topic mixture, take the top 3 topics, pick each topic's single most
representative training tweet, and rank the hashtags those tweets carry.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .corpus import CleanTweet
from .errors import DataError, UnscorableTweetError
from .recommend import Recommendation

DEFAULT_TOPICS = 100
DEFAULT_BETA = 0.01
DEFAULT_ITERS = 500
DEFAULT_FOLD_IN_ITERS = 50
TOP_TOPICS = 3


@dataclass
class LdaModel:
    n_topics: int
    alpha: float
    beta: float
    topic_word: np.ndarray  # n_topics x vocab, rows sum to 1
    doc_topic: np.ndarray  # n_docs x n_topics, rows sum to 1
    doc_ids: list[str]
    vocabulary: list[str]
    seed: int
    gibbs_iters: int
    fold_in_iters: int = DEFAULT_FOLD_IN_ITERS
    assignment_totals: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {w: i for i, w in enumerate(self.vocabulary)}


@njit(cache=True)
def _gibbs_kernel(doc_of, word_of, n_docs, n_topics, n_words, alpha, beta, iters, seed):
    np.random.seed(seed)
    n_tokens = doc_of.shape[0]
    z = np.empty(n_tokens, dtype=np.int64)
    n_dk = np.zeros((n_docs, n_topics), dtype=np.int64)
    n_kw = np.zeros((n_topics, n_words), dtype=np.int64)
    n_k = np.zeros(n_topics, dtype=np.int64)
    totals = np.empty(iters + 1, dtype=np.int64)

    for t in range(n_tokens):
        k = np.random.randint(0, n_topics)
        z[t] = k
        n_dk[doc_of[t], k] += 1
        n_kw[k, word_of[t]] += 1
        n_k[k] += 1
    totals[0] = n_k.sum()

    probs = np.empty(n_topics, dtype=np.float64)
    v_beta = n_words * beta
    for it in range(iters):
        for t in range(n_tokens):
            d = doc_of[t]
            w = word_of[t]
            k = z[t]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1

            total = 0.0
            for kk in range(n_topics):
                p = (n_kw[kk, w] + beta) / (n_k[kk] + v_beta) * (n_dk[d, kk] + alpha)
                probs[kk] = p
                total += p
            r = np.random.random() * total
            acc = 0.0
            new_k = n_topics - 1
            for kk in range(n_topics):
                acc += probs[kk]
                if r < acc:
                    new_k = kk
                    break

            z[t] = new_k
            n_dk[d, new_k] += 1
            n_kw[new_k, w] += 1
            n_k[new_k] += 1
        totals[it + 1] = n_k.sum()
    return n_dk, n_kw, n_k, totals


@njit(cache=True)
def _fold_in_kernel(word_ids, topic_word, alpha, iters, seed):
    np.random.seed(seed)
    n_topics = topic_word.shape[0]
    n_tokens = word_ids.shape[0]
    z = np.empty(n_tokens, dtype=np.int64)
    m_k = np.zeros(n_topics, dtype=np.int64)
    for t in range(n_tokens):
        k = np.random.randint(0, n_topics)
        z[t] = k
        m_k[k] += 1

    probs = np.empty(n_topics, dtype=np.float64)
    for it in range(iters):
        for t in range(n_tokens):
            w = word_ids[t]
            k = z[t]
            m_k[k] -= 1
            total = 0.0
            for kk in range(n_topics):
                p = topic_word[kk, w] * (m_k[kk] + alpha)
                probs[kk] = p
                total += p
            r = np.random.random() * total
            acc = 0.0
            new_k = n_topics - 1
            for kk in range(n_topics):
                acc += probs[kk]
                if r < acc:
                    new_k = kk
                    break
            z[t] = new_k
            m_k[new_k] += 1
    return (m_k + alpha) / (n_tokens + n_topics * alpha)


def lda_train(
    train_tweets: list[CleanTweet],
    n_topics: int = DEFAULT_TOPICS,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    fold_in_iters: int = DEFAULT_FOLD_IN_ITERS,
) -> LdaModel:
    """Collapsed Gibbs sampling over token-topic assignments."""
    if not train_tweets:
        raise DataError("cannot train LDA on an empty corpus")
    if n_topics < 1 or iters < 1:
        raise DataError("n_topics and iters must be >= 1")
    if alpha is None:
        alpha = 50.0 / n_topics

    vocabulary = sorted({tok for t in train_tweets for tok in t.tokens})
    if not vocabulary:
        raise DataError("LDA vocabulary is empty")
    index = {w: i for i, w in enumerate(vocabulary)}

    doc_of: list[int] = []
    word_of: list[int] = []
    for d, tweet in enumerate(train_tweets):
        for tok in tweet.tokens:
            doc_of.append(d)
            word_of.append(index[tok])

    n_dk, n_kw, n_k, totals = _gibbs_kernel(
        np.array(doc_of, dtype=np.int64),
        np.array(word_of, dtype=np.int64),
        len(train_tweets),
        n_topics,
        len(vocabulary),
        float(alpha),
        float(beta),
        iters,
        seed & 0x7FFFFFFF,
    )
    if not np.all(totals == len(doc_of)):
        raise AssertionError("Gibbs bookkeeping lost topic assignments")

    topic_word = (n_kw + beta) / (n_k + len(vocabulary) * beta)[:, None]
    n_d = n_dk.sum(axis=1)
    doc_topic = (n_dk + alpha) / (n_d + n_topics * alpha)[:, None]
    return LdaModel(
        n_topics=n_topics,
        alpha=float(alpha),
        beta=float(beta),
        topic_word=topic_word,
        doc_topic=doc_topic,
        doc_ids=[t.id for t in train_tweets],
        vocabulary=vocabulary,
        seed=seed,
        gibbs_iters=iters,
        fold_in_iters=fold_in_iters,
        assignment_totals=totals,
        index=index,
    )


def _fold_in_seed(model_seed: int, tweet_id: str) -> int:
    digest = hashlib.sha256(f"{model_seed}:{tweet_id}".encode()).digest()
    return int.from_bytes(digest[:4], "little") & 0x7FFFFFFF


def infer_topics(model: LdaModel, tweet: CleanTweet) -> np.ndarray:
    """Fold-in topic mixture for one tweet; seeded per tweet id."""
    word_ids = np.array(
        [model.index[tok] for tok in tweet.tokens if tok in model.index], dtype=np.int64
    )
    if word_ids.size == 0:
        raise UnscorableTweetError(f"tweet {tweet.id}: no token in the LDA vocabulary")
    return _fold_in_kernel(
        word_ids,
        model.topic_word,
        model.alpha,
        model.fold_in_iters,
        _fold_in_seed(model.seed, tweet.id),
    )


def lda_recommend(
    model: LdaModel, train_tweets: list[CleanTweet], tweet: CleanTweet, k: int
) -> Recommendation:
    """Hashtags of the representative tweets of the top fold-in topics.

    Per top topic, the representative is the training tweet most aligned
    with it (ties by lexicographic id). Pooled hashtags rank by source
    topic weight, then training-corpus frequency, then name.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    theta = infer_topics(model, tweet)
    order = np.argsort(-theta, kind="stable")
    top = [int(t) for t in order[: min(TOP_TOPICS, model.n_topics)]]

    by_id = {t.id: t for t in train_tweets}
    tag_freq: Counter = Counter()
    for t in train_tweets:
        tag_freq.update(t.hashtags)

    weight_of: dict[str, float] = {}
    for topic in top:
        col = model.doc_topic[:, topic]
        best = col.max()
        rep_id = min(model.doc_ids[i] for i in np.flatnonzero(col == best))
        for tag in by_id[rep_id].hashtags:
            weight = float(theta[topic])
            if tag not in weight_of or weight > weight_of[tag]:
                weight_of[tag] = weight

    ranked = sorted(weight_of.items(), key=lambda kv: (-kv[1], -tag_freq[kv[0]], kv[0]))[:k]
    found = sum(1 for tok in tweet.tokens if tok in model.index)
    cov = found / len(tweet.tokens) if tweet.tokens else 0.0
    return Recommendation(tweet_id=tweet.id, best=ranked[0][0], ranked=ranked, coverage=cov)


def lda_recommend_batch(
    model: LdaModel, train_tweets: list[CleanTweet], tweets: list[CleanTweet], k_for
) -> list[Recommendation]:
    out = []
    for tweet in tweets:
        try:
            out.append(lda_recommend(model, train_tweets, tweet, k_for(tweet)))
        except UnscorableTweetError:
            out.append(Recommendation(tweet.id, None, [], 0.0))
    return out
