"""Metric protocols, lift arithmetic, and metric identities."""

import json

import numpy as np
import pytest

from tagrec.errors import DataError
from tagrec.evaluate import (
    EvalReport,
    eval_aloc,
    eval_muc,
    lift,
    write_per_tweet_csv,
    write_report_json,
)
from tagrec.recommend import Recommendation


def _rec(i, best, ranked=None, coverage=1.0):
    if ranked is None:
        ranked = [] if best is None else [(best, 0.9)]
    return Recommendation(tweet_id=f"t{i}", best=best, ranked=ranked, coverage=coverage)


class TestAloc:
    def test_three_of_four(self):
        recs = [_rec(0, "a"), _rec(1, "b"), _rec(2, "c"), _rec(3, "x")]
        truth = {"t0": {"a"}, "t1": {"b", "z"}, "t2": {"c"}, "t3": {"y"}}
        report = eval_aloc(recs, truth)
        assert report.score == pytest.approx(0.75)
        assert report.n_tweets == 4
        assert report.n_unscorable == 0

    def test_all_unscorable_scores_zero(self):
        recs = [_rec(i, None) for i in range(3)]
        truth = {f"t{i}": {"a"} for i in range(3)}
        report = eval_aloc(recs, truth)
        assert report.score == 0.0
        assert report.n_unscorable == 3
        assert all(k == 1 for _, _, k in report.per_tweet)

    def test_matches_membership_oracle(self):
        rng = np.random.default_rng(31)
        tags = list("abcdef")
        recs, truth = [], {}
        for i in range(50):
            true_set = {tags[j] for j in rng.integers(0, 6, size=rng.integers(1, 4))}
            best = tags[int(rng.integers(0, 6))] if rng.random() > 0.1 else None
            recs.append(_rec(i, best))
            truth[f"t{i}"] = true_set
        report = eval_aloc(recs, truth)
        hits = sum(1 for r in recs if r.best is not None and r.best in truth[r.tweet_id])
        assert report.score == pytest.approx(hits / 50)

    def test_missing_truth_errors(self):
        with pytest.raises(DataError):
            eval_aloc([_rec(0, "a")], {})


class TestMuc:
    def test_half_hit(self):
        recs = [_rec(0, "a", ranked=[("a", 0.9), ("c", 0.5)])]
        truth = {"t0": {"a", "b"}}
        report = eval_muc(recs, truth)
        assert report.per_tweet == [("t0", 1, 2)]
        assert report.score == pytest.approx(0.5)

    def test_exact_match_scores_one(self):
        recs = [
            _rec(0, "a", ranked=[("a", 0.9), ("b", 0.8)]),
            _rec(1, "c", ranked=[("c", 0.7)]),
        ]
        truth = {"t0": {"a", "b"}, "t1": {"c"}}
        assert eval_muc(recs, truth).score == 1.0

    def test_matches_intersection_oracle(self):
        rng = np.random.default_rng(32)
        tags = list("abcdefgh")
        recs, truth = [], {}
        for i in range(40):
            true_set = {tags[j] for j in rng.integers(0, 8, size=rng.integers(1, 5))}
            k = len(true_set)
            n_rank = int(rng.integers(0, k + 1))
            ranked = [(tags[int(rng.integers(0, 8))], 0.5) for _ in range(n_rank)]
            best = ranked[0][0] if ranked else None
            recs.append(_rec(i, best, ranked=ranked))
            truth[f"t{i}"] = true_set
        report = eval_muc(recs, truth)
        total_hits = sum(
            sum(1 for t, _ in r.ranked if t in truth[r.tweet_id]) for r in recs
        )
        total_k = sum(len(truth[r.tweet_id]) for r in recs)
        assert report.score == pytest.approx(total_hits / total_k)

    def test_overlong_recommendation_rejected(self):
        recs = [_rec(0, "a", ranked=[("a", 0.9), ("b", 0.8)])]
        with pytest.raises(DataError):
            eval_muc(recs, {"t0": {"a"}})

    def test_unscorable_contributes_true_k(self):
        recs = [_rec(0, None, ranked=[]), _rec(1, "a", ranked=[("a", 1.0), ("b", 0.9), ("c", 0.1)])]
        truth = {"t0": {"x", "y", "z"}, "t1": {"a", "b", "c"}}
        report = eval_muc(recs, truth)
        assert report.per_tweet == [("t0", 0, 3), ("t1", 3, 3)]
        assert report.score == pytest.approx(0.5)


class TestLift:
    def test_published_ratios_round_to_two_decimals(self):
        assert round(lift(0.5829, 0.0779), 2) == 7.48
        assert round(lift(0.5083, 0.0779), 2) == 6.53

    def test_identity(self):
        assert lift(0.37, 0.37) == 1.0

    def test_linear(self):
        rng = np.random.default_rng(33)
        for _ in range(20):
            s = float(rng.uniform(0.01, 1.0))
            a = float(rng.uniform(0.1, 10.0))
            assert lift(a * s, s) == pytest.approx(a, abs=1e-12)

    def test_nonpositive_baseline_rejected(self):
        with pytest.raises(DataError):
            lift(0.5, 0.0)
        with pytest.raises(DataError):
            lift(0.5, -0.1)


class TestMetricIdentities:
    def test_aloc_equals_muc_for_single_truth_k1(self):
        rng = np.random.default_rng(34)
        tags = list("abcd")
        recs, truth = [], {}
        for i in range(30):
            true_tag = tags[int(rng.integers(0, 4))]
            guess = tags[int(rng.integers(0, 4))]
            recs.append(_rec(i, guess, ranked=[(guess, 0.5)]))
            truth[f"t{i}"] = {true_tag}
        assert eval_aloc(recs, truth).score == eval_muc(recs, truth).score

    def test_muc_precision_equals_recall_with_full_lists(self):
        rng = np.random.default_rng(35)
        tags = list("abcdef")
        recs, truth = [], {}
        for i in range(30):
            true_set = {tags[j] for j in rng.integers(0, 6, size=rng.integers(1, 4))}
            k = len(true_set)
            seen = []
            for j in rng.permutation(6):
                if len(seen) == k:
                    break
                seen.append(tags[int(j)])
            recs.append(_rec(i, seen[0], ranked=[(t, 0.5) for t in seen]))
            truth[f"t{i}"] = true_set
        report = eval_muc(recs, truth)
        for rec, (tweet_id, hits, k) in zip(recs, report.per_tweet):
            assert len(rec.ranked) == k
            precision = hits / len(rec.ranked)
            recall = hits / len(truth[tweet_id])
            assert precision == recall

    def test_evaluation_order_invariant(self):
        rng = np.random.default_rng(36)
        recs = [_rec(i, "a" if rng.random() < 0.5 else "b") for i in range(20)]
        truth = {f"t{i}": {"a"} for i in range(20)}
        base = eval_aloc(recs, truth).score
        for _ in range(3):
            perm = list(rng.permutation(20))
            assert eval_aloc([recs[i] for i in perm], truth).score == base


class TestReportOutputs:
    def test_json_report(self, tmp_path):
        report = EvalReport(metric="ALOC", score=0.75, n_tweets=4, n_unscorable=1,
                            per_tweet=[("t0", 1, 1)])
        path = tmp_path / "report.json"
        write_report_json(path, report, lift_vs_baseline=7.48)
        data = json.loads(path.read_text())
        assert data["metric"] == "ALOC"
        assert data["score"] == 0.75
        assert data["n"] == 4
        assert data["unscorable"] == 1
        assert data["lift_vs_baseline"] == 7.48
        assert "hit-rate" in data["score_definition"]

    def test_per_tweet_csv(self, tmp_path):
        report = EvalReport(metric="MuC", score=0.5, n_tweets=2, n_unscorable=0,
                            per_tweet=[("t0", 1, 2), ("t1", 0, 1)])
        path = tmp_path / "per_tweet.csv"
        write_per_tweet_csv(path, report)
        assert path.read_text().splitlines() == ["id,hit,k", "t0,1,2", "t1,0,1"]
