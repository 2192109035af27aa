"""Per-hashtag and global trained artifacts, and their disk bundles."""

import numpy as np
import pytest

from tagrec.corpus import CleanTweet
from tagrec.errors import BundleError, DataError, UntrainableDocumentError
from tagrec.models import (
    Model1,
    Model2,
    build_cooccurrence,
    build_hashtag_documents,
    document_vector,
    load_bundle,
    load_hashtag_vectors,
    save_bundle,
    save_hashtag_vectors,
    train_model1,
    train_model2,
)
from tagrec.skipgram import TrainConfig, lookup


def _tweet(i, tokens, tags):
    return CleanTweet(id=f"t{i:03d}", tokens=list(tokens), hashtags=set(tags))


def _toy_corpus():
    """Three hashtags over a small shared vocabulary."""
    rows = [
        (["alpha", "beta", "alpha"], {"one"}),
        (["beta", "gamma"], {"one", "two"}),
        (["gamma", "alpha", "beta"], {"two"}),
        (["delta", "beta"], {"three"}),
        (["alpha", "delta", "delta"], {"three", "one"}),
        (["beta", "beta", "gamma"], {"two"}),
    ] * 4
    return [_tweet(i, toks, tags) for i, (toks, tags) in enumerate(rows)]


CFG = TrainConfig(window=2, min_count=1, dim=6, epochs=2, seed=13)


class TestHashtagDocuments:
    def test_multi_tag_fan_out(self):
        tweets = [_tweet(0, ["a", "b"], {"x", "y"})]
        docs = build_hashtag_documents(tweets)
        assert set(docs) == {"x", "y"}
        assert docs["x"].token_lists == [["a", "b"]]
        assert docs["y"].token_lists == [["a", "b"]]
        assert docs["x"].tweet_ids == ["t000"]

    def test_empty(self):
        assert build_hashtag_documents([]) == {}

    def test_matches_inverted_index_oracle(self):
        rng = np.random.default_rng(6)
        tags = ["p", "q", "r", "s"]
        tweets = [
            _tweet(i, [f"w{j}" for j in rng.integers(0, 9, size=3)],
                   {tags[j] for j in rng.integers(0, 4, size=rng.integers(1, 3))})
            for i in range(20)
        ]
        docs = build_hashtag_documents(tweets)
        for tag in tags:
            member_ids = [t.id for t in tweets if tag in t.hashtags]
            if not member_ids:
                assert tag not in docs
                continue
            assert docs[tag].tweet_ids == member_ids
            assert docs[tag].token_lists == [t.tokens for t in tweets if tag in t.hashtags]


class TestTrainModel1:
    def test_single_repeated_word_vector_is_word_vector(self):
        tweets = [_tweet(0, ["solo", "solo", "solo"], {"x"})]
        model = train_model1(tweets, TrainConfig(window=1, min_count=1, dim=4, seed=0))
        v = lookup(model.embeddings["x"], "solo")
        np.testing.assert_allclose(model.hashtag_vectors["x"], v, rtol=0, atol=0)

    def test_occurrence_weighting(self):
        # "a" three times, "b" once: average = (3 v_a + v_b) / 4
        tweets = [_tweet(0, ["a", "a", "b", "a"], {"x"})]
        model = train_model1(tweets, TrainConfig(window=1, min_count=1, dim=4, seed=1))
        emb = model.embeddings["x"]
        va = lookup(emb, "a").astype(np.float64)
        vb = lookup(emb, "b").astype(np.float64)
        np.testing.assert_allclose(
            model.hashtag_vectors["x"], (3 * va + vb) / 4, rtol=0, atol=1e-15
        )

    def test_vectors_match_serialized_reaverage_oracle(self, tmp_path):
        tweets = _toy_corpus()
        model = train_model1(tweets, CFG)
        save_bundle(model, tmp_path / "bundle")
        back = load_bundle(tmp_path / "bundle")
        docs = build_hashtag_documents(tweets)
        for tag, doc in docs.items():
            emb = back.embeddings[tag]
            rows = []
            for sent in doc.token_lists:
                for tok in sent:
                    vec = lookup(emb, tok)
                    if vec is not None:
                        rows.append(vec.astype(np.float64))
            expected = np.zeros(CFG.dim)
            for r in rows:
                expected += r
            expected /= len(rows)
            np.testing.assert_allclose(back.hashtag_vectors[tag], expected, atol=1e-9, rtol=0)

    def test_untrainable_hashtag_gets_absent_vector(self):
        tweets = [
            _tweet(0, ["common", "common"], {"good"}),
            _tweet(1, ["loner"], {"bad"}),
        ]
        model = train_model1(tweets, TrainConfig(window=1, min_count=2, dim=4, seed=0))
        assert model.hashtag_vectors["bad"] is None
        assert "bad" not in model.embeddings
        assert model.hashtag_vectors["good"] is not None

    def test_all_untrainable_errors(self):
        tweets = [_tweet(0, ["a"], {"x"})]
        with pytest.raises(UntrainableDocumentError):
            train_model1(tweets, TrainConfig(window=1, min_count=5, dim=4))

    def test_empty_corpus_errors(self):
        with pytest.raises(DataError):
            train_model1([], CFG)

    def test_deterministic(self):
        a = train_model1(_toy_corpus(), CFG)
        b = train_model1(_toy_corpus(), CFG)
        for tag in a.hashtag_vectors:
            np.testing.assert_array_equal(a.hashtag_vectors[tag], b.hashtag_vectors[tag])
            np.testing.assert_array_equal(a.embeddings[tag].vectors, b.embeddings[tag].vectors)


class TestTrainModel2:
    def test_whole_corpus_hashtag_is_global_mean(self):
        tweets = [
            _tweet(0, ["a", "b"], {"all"}),
            _tweet(1, ["b", "c", "c"], {"all"}),
        ] * 3
        model = train_model2(tweets, TrainConfig(window=1, min_count=1, dim=4, seed=2))
        total = np.zeros(4)
        count = 0
        for t in tweets:
            for tok in t.tokens:
                total += lookup(model.global_model, tok).astype(np.float64)
                count += 1
        np.testing.assert_allclose(model.hashtag_vectors["all"], total / count, atol=1e-12)

    def test_identical_documents_identical_vectors(self):
        # both tags sit on exactly the same tweets, so their documents match
        tweets = [_tweet(i, ["w1", "w2", "w3"], {"p", "q"}) for i in range(5)]
        model = train_model2(tweets, TrainConfig(window=1, min_count=1, dim=4, seed=3))
        np.testing.assert_array_equal(model.hashtag_vectors["p"], model.hashtag_vectors["q"])

    def test_vectors_match_serialized_reaverage_oracle(self, tmp_path):
        tweets = _toy_corpus()
        model = train_model2(tweets, CFG)
        save_bundle(model, tmp_path / "bundle")
        back = load_bundle(tmp_path / "bundle")
        docs = build_hashtag_documents(tweets)
        for tag, doc in docs.items():
            rows = [
                lookup(back.global_model, tok).astype(np.float64)
                for sent in doc.token_lists
                for tok in sent
                if lookup(back.global_model, tok) is not None
            ]
            expected = sum(rows) / len(rows)
            np.testing.assert_allclose(back.hashtag_vectors[tag], expected, atol=1e-9, rtol=0)

    def test_fully_oov_document_absent(self):
        tweets = [
            _tweet(0, ["seen", "seen"], {"good"}),
            _tweet(1, ["unique"], {"rare"}),
        ]
        model = train_model2(tweets, TrainConfig(window=1, min_count=2, dim=4, seed=0))
        assert model.hashtag_vectors["rare"] is None
        assert model.hashtag_vectors["good"] is not None

    def test_untrainable_global_document_errors(self):
        tweets = [_tweet(0, ["a"], {"x"}), _tweet(1, ["b"], {"y"})]
        with pytest.raises(UntrainableDocumentError):
            train_model2(tweets, TrainConfig(window=1, min_count=3, dim=4))


class TestStructuralInvariants:
    def test_same_hashtag_key_sets(self):
        tweets = _toy_corpus()
        m1 = train_model1(tweets, CFG)
        m2 = train_model2(tweets, CFG)
        assert set(m1.hashtag_vectors) == set(m2.hashtag_vectors)

    def test_average_norm_bounded_by_max_word_norm(self):
        tweets = _toy_corpus()
        m1 = train_model1(tweets, CFG)
        for tag, vec in m1.hashtag_vectors.items():
            if vec is None:
                continue
            max_norm = max(
                float(np.linalg.norm(row.astype(np.float64)))
                for row in m1.embeddings[tag].vectors
            )
            assert np.linalg.norm(vec) <= max_norm + 1e-6
        m2 = train_model2(tweets, CFG)
        global_max = max(
            float(np.linalg.norm(row.astype(np.float64))) for row in m2.global_model.vectors
        )
        for vec in m2.hashtag_vectors.values():
            if vec is not None:
                assert np.linalg.norm(vec) <= global_max + 1e-6

    def test_cooccurrence_symmetric(self):
        cooc = build_cooccurrence(_toy_corpus())
        for tag, others in cooc.items():
            assert tag in others  # every tweet containing tag contains tag
            for other in others:
                assert tag in cooc[other]


class TestBundles:
    @pytest.mark.parametrize("kind", ["model1", "model2"])
    def test_roundtrip_bitwise(self, tmp_path, kind):
        tweets = _toy_corpus()
        model = train_model1(tweets, CFG) if kind == "model1" else train_model2(tweets, CFG)
        model.pipeline_hash = "abc123"
        save_bundle(model, tmp_path / "b")
        back = load_bundle(tmp_path / "b")
        assert back.kind == kind
        assert back.config == model.config
        assert back.pipeline_hash == "abc123"
        assert back.cooccurrence == model.cooccurrence
        assert back.tweet_hashtags == model.tweet_hashtags
        for tag, vec in model.hashtag_vectors.items():
            if vec is None:
                assert back.hashtag_vectors[tag] is None
            else:
                np.testing.assert_array_equal(back.hashtag_vectors[tag], vec)
        if kind == "model1":
            assert set(back.embeddings) == set(model.embeddings)
            for tag in model.embeddings:
                np.testing.assert_array_equal(
                    back.embeddings[tag].vectors, model.embeddings[tag].vectors
                )
        else:
            np.testing.assert_array_equal(back.global_model.vectors, model.global_model.vectors)

    def test_save_twice_identical_bytes(self, tmp_path):
        model = train_model2(_toy_corpus(), CFG)
        save_bundle(model, tmp_path / "b1")
        save_bundle(model, tmp_path / "b2")
        for name in ["manifest.json", "global.emb", "hashtag_vectors.bin", "cooccurrence.json"]:
            assert (tmp_path / "b1" / name).read_bytes() == (tmp_path / "b2" / name).read_bytes()

    def test_corrupted_file_rejected(self, tmp_path):
        model = train_model2(_toy_corpus(), CFG)
        save_bundle(model, tmp_path / "b")
        target = tmp_path / "b" / "hashtag_vectors.bin"
        data = bytearray(target.read_bytes())
        data[len(data) // 2] ^= 0xFF
        target.write_bytes(bytes(data))
        with pytest.raises(BundleError):
            load_bundle(tmp_path / "b")

    def test_missing_manifest_rejected(self, tmp_path):
        with pytest.raises(BundleError):
            load_bundle(tmp_path)

    def test_absent_vectors_listed_in_manifest(self, tmp_path):
        tweets = [
            _tweet(0, ["seen", "seen"], {"good"}),
            _tweet(1, ["unique"], {"rare"}),
        ]
        model = train_model2(tweets, TrainConfig(window=1, min_count=2, dim=4, seed=0))
        save_bundle(model, tmp_path / "b")
        back = load_bundle(tmp_path / "b")
        assert back.hashtag_vectors["rare"] is None

    def test_hashtag_vector_file_roundtrip(self, tmp_path):
        vectors = {
            "x": np.array([1.5, -2.25, 0.125]),
            "y": np.array([0.0, 1e-12, 3.0]),
        }
        path = tmp_path / "v.bin"
        save_hashtag_vectors(vectors, path)
        back = load_hashtag_vectors(path)
        assert set(back) == {"x", "y"}
        np.testing.assert_array_equal(back["x"], vectors["x"])
        np.testing.assert_array_equal(back["y"], vectors["y"])


class TestDocumentVector:
    def test_skips_oov_occurrences(self):
        model = train_model2(
            [_tweet(0, ["a", "a", "b", "b"], {"x"})], TrainConfig(window=1, min_count=2, dim=4, seed=0)
        ).global_model
        vec = document_vector(model, [["a", "zzz", "b"]])
        va = lookup(model, "a").astype(np.float64)
        vb = lookup(model, "b").astype(np.float64)
        np.testing.assert_allclose(vec, (va + vb) / 2, atol=1e-15)

    def test_none_when_everything_oov(self):
        model = train_model2(
            [_tweet(0, ["a", "a"], {"x"})], TrainConfig(window=1, min_count=1, dim=4, seed=0)
        ).global_model
        assert document_vector(model, [["zzz"]]) is None
