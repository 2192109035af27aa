"""Recommendation-quality metrics and lift against a baseline.

Two protocols: single-recommendation hit rate (ALOC), and top-K overlap
where K is the tweet's ground-truth hashtag count (MuC). Both aggregate
micro-style: total hits over total slots, so MuC per-tweet precision
equals recall whenever exactly K hashtags are recommended, and the two
metrics coincide when every tweet has a single ground-truth hashtag.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .recommend import Recommendation

ALOC = "ALOC"
MUC = "MuC"

SCORE_DEFINITIONS = {
    # single recommendation: precision, recall, and F1 all collapse to hit rate
    ALOC: "hit-rate over single recommendations (reported elsewhere as F1)",
    MUC: "micro-averaged top-K overlap with K = ground-truth size (accuracy = F1)",
}


@dataclass
class EvalReport:
    metric: str
    score: float
    n_tweets: int
    n_unscorable: int
    per_tweet: list[tuple[str, int, int]]  # (tweet id, hit count, k)

    def to_dict(self, lift_vs_baseline: float | None = None) -> dict:
        out = {
            "metric": self.metric,
            "score": self.score,
            "score_definition": SCORE_DEFINITIONS[self.metric],
            "n": self.n_tweets,
            "unscorable": self.n_unscorable,
            "lift_vs_baseline": lift_vs_baseline,
        }
        return out


def _truth_for(rec: Recommendation, truth: dict[str, set[str]]) -> set[str]:
    if rec.tweet_id not in truth:
        raise DataError(f"no ground truth for tweet {rec.tweet_id}: corpus mismatch")
    return truth[rec.tweet_id]


def eval_aloc(recs: list[Recommendation], truth: dict[str, set[str]]) -> EvalReport:
    """Hit iff the single best recommendation is in the ground-truth set."""
    per_tweet = []
    for rec in recs:
        tags = _truth_for(rec, truth)
        hit = 1 if rec.best is not None and rec.best in tags else 0
        per_tweet.append((rec.tweet_id, hit, 1))
    total = len(per_tweet)
    hits = sum(h for _, h, _ in per_tweet)
    return EvalReport(
        metric=ALOC,
        score=hits / total if total else 0.0,
        n_tweets=total,
        n_unscorable=sum(1 for r in recs if not r.scorable),
        per_tweet=per_tweet,
    )


def eval_muc(recs: list[Recommendation], truth: dict[str, set[str]]) -> EvalReport:
    """Top-K overlap with K = |ground truth|, aggregated as total hits / total K."""
    per_tweet = []
    for rec in recs:
        tags = _truth_for(rec, truth)
        k = len(tags)
        if len(rec.ranked) > k:
            raise DataError(
                f"tweet {rec.tweet_id}: {len(rec.ranked)} recommendations but k={k}; "
                "recommendations must be produced with k = ground-truth size"
            )
        hits = sum(1 for tag, _ in rec.ranked if tag in tags)
        per_tweet.append((rec.tweet_id, hits, k))
    total_k = sum(k for _, _, k in per_tweet)
    total_hits = sum(h for _, h, _ in per_tweet)
    return EvalReport(
        metric=MUC,
        score=total_hits / total_k if total_k else 0.0,
        n_tweets=len(per_tweet),
        n_unscorable=sum(1 for r in recs if not r.scorable),
        per_tweet=per_tweet,
    )


def lift(score: float, baseline_score: float) -> float:
    """Ratio of a score to a baseline score on the same task."""
    if baseline_score <= 0:
        raise DataError(f"baseline score must be positive, got {baseline_score}")
    return score / baseline_score


def write_report_json(path: str | Path, report: EvalReport, lift_vs_baseline: float | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(lift_vs_baseline), fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_per_tweet_csv(path: str | Path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "hit", "k"])
        for tweet_id, hit, k in report.per_tweet:
            writer.writerow([tweet_id, hit, k])
