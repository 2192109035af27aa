"""Trained recommendation artifacts.

Two kinds: one embedding space per hashtag with a per-hashtag average
vector ("model1"), or a single global embedding space with per-hashtag
average vectors ("model2"). Both carry hashtag co-occurrence and per-tweet
hashtag metadata gathered from the training corpus, and both serialize to
a bundle directory with checksummed files.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import CleanTweet
from .errors import BundleError, DataError, UntrainableDocumentError
from .skipgram import (
    EmbeddingModel,
    TrainConfig,
    load_model,
    lookup,
    save_model,
    train,
)

VECTORS_MAGIC = b"EMTV"
BUNDLE_FORMAT_VERSION = 1

MODEL1 = "model1"
MODEL2 = "model2"


@dataclass
class HashtagDocument:
    hashtag: str
    token_lists: list[list[str]]
    tweet_ids: list[str]


@dataclass
class Model1:
    embeddings: dict[str, EmbeddingModel]  # only hashtags that trained
    hashtag_vectors: dict[str, np.ndarray | None]  # None = absent vector
    cooccurrence: dict[str, set[str]]
    tweet_hashtags: dict[str, set[str]]
    config: TrainConfig
    pipeline_hash: str = ""
    kind: str = field(default=MODEL1, init=False)


@dataclass
class Model2:
    global_model: EmbeddingModel
    hashtag_vectors: dict[str, np.ndarray | None]
    cooccurrence: dict[str, set[str]]
    tweet_hashtags: dict[str, set[str]]
    config: TrainConfig
    pipeline_hash: str = ""
    kind: str = field(default=MODEL2, init=False)


def build_hashtag_documents(train_tweets: list[CleanTweet]) -> dict[str, HashtagDocument]:
    """One document per hashtag: the token lists of every tweet carrying it.

    A tweet with k hashtags contributes its token list to k documents.
    Documents appear in first-occurrence order; token lists in input order.
    """
    docs: dict[str, HashtagDocument] = {}
    for tweet in train_tweets:
        for tag in sorted(tweet.hashtags):
            doc = docs.get(tag)
            if doc is None:
                doc = docs[tag] = HashtagDocument(hashtag=tag, token_lists=[], tweet_ids=[])
            doc.token_lists.append(tweet.tokens)
            doc.tweet_ids.append(tweet.id)
    return docs


def build_cooccurrence(train_tweets: list[CleanTweet]) -> dict[str, set[str]]:
    cooc: dict[str, set[str]] = {}
    for tweet in train_tweets:
        for tag in tweet.hashtags:
            cooc.setdefault(tag, set()).update(tweet.hashtags)
    return cooc


def document_vector(model: EmbeddingModel, token_lists: list[list[str]]) -> np.ndarray | None:
    """Occurrence-weighted mean vector of a document under `model`'s vocabulary.

    Every token occurrence that is in the vocabulary contributes its row;
    repeats count once per occurrence. The denominator is the number of
    surviving occurrences. None when nothing survives.
    """
    index = model.vocabulary.index
    total = np.zeros(model.dim, dtype=np.float64)
    found = 0
    for sent in token_lists:
        for tok in sent:
            i = index.get(tok)
            if i is not None:
                total += model.vectors[i]
                found += 1
    if found == 0:
        return None
    return total / found


def train_model1(train_tweets: list[CleanTweet], cfg: TrainConfig) -> Model1:
    """Train one private embedding space per hashtag plus its average vector."""
    if not train_tweets:
        raise DataError("cannot train on an empty corpus")
    docs = build_hashtag_documents(train_tweets)
    embeddings: dict[str, EmbeddingModel] = {}
    vectors: dict[str, np.ndarray | None] = {}
    for tag, doc in docs.items():
        try:
            model = train(doc.token_lists, cfg)
        except UntrainableDocumentError:
            vectors[tag] = None
            continue
        embeddings[tag] = model
        vectors[tag] = document_vector(model, doc.token_lists)
    if not embeddings:
        raise UntrainableDocumentError("no hashtag document is trainable under this config")
    return Model1(
        embeddings=embeddings,
        hashtag_vectors=vectors,
        cooccurrence=build_cooccurrence(train_tweets),
        tweet_hashtags={t.id: set(t.hashtags) for t in train_tweets},
        config=cfg,
    )


def train_model2(train_tweets: list[CleanTweet], cfg: TrainConfig) -> Model2:
    """Train one global embedding space and per-hashtag average vectors."""
    if not train_tweets:
        raise DataError("cannot train on an empty corpus")
    global_model = train([t.tokens for t in train_tweets], cfg)
    docs = build_hashtag_documents(train_tweets)
    vectors = {tag: document_vector(global_model, doc.token_lists) for tag, doc in docs.items()}
    return Model2(
        global_model=global_model,
        hashtag_vectors=vectors,
        cooccurrence=build_cooccurrence(train_tweets),
        tweet_hashtags={t.id: set(t.hashtags) for t in train_tweets},
        config=cfg,
    )


def save_hashtag_vectors(vectors: dict[str, np.ndarray], path: str | Path) -> None:
    """Binary tag -> vector map: magic, version u16, dim u32, count u64, then
    per tag a u32-length-prefixed UTF-8 string and dim little-endian f64."""
    tags = sorted(vectors)
    dim = len(next(iter(vectors.values()))) if tags else 0
    with open(path, "wb") as fh:
        fh.write(VECTORS_MAGIC)
        fh.write(struct.pack("<HIQ", BUNDLE_FORMAT_VERSION, dim, len(tags)))
        for tag in tags:
            encoded = tag.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(np.asarray(vectors[tag], dtype="<f8").tobytes())


def load_hashtag_vectors(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(4) != VECTORS_MAGIC:
            raise BundleError(f"{path}: not a hashtag-vector file")
        version, dim, count = struct.unpack("<HIQ", fh.read(14))
        if version != BUNDLE_FORMAT_VERSION:
            raise BundleError(f"{path}: unsupported version {version}")
        vectors: dict[str, np.ndarray] = {}
        for _ in range(count):
            data = fh.read(4)
            if len(data) != 4:
                raise BundleError(f"{path}: truncated hashtag-vector file")
            (tlen,) = struct.unpack("<I", data)
            tag = fh.read(tlen).decode("utf-8")
            buf = fh.read(8 * dim)
            if len(buf) != 8 * dim:
                raise BundleError(f"{path}: truncated hashtag-vector file")
            vectors[tag] = np.frombuffer(buf, dtype="<f8").copy()
    return vectors


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def save_bundle(model: Model1 | Model2, bundle_dir: str | Path) -> None:
    """Write a model bundle directory with a checksummed manifest."""
    bundle_dir = Path(bundle_dir)
    bundle_dir.mkdir(parents=True, exist_ok=True)

    present = {tag: vec for tag, vec in model.hashtag_vectors.items() if vec is not None}
    absent = sorted(tag for tag, vec in model.hashtag_vectors.items() if vec is None)

    files: list[str] = []
    if model.kind == MODEL1:
        per_dir = bundle_dir / "per_hashtag"
        per_dir.mkdir(exist_ok=True)
        for tag, emb in model.embeddings.items():
            save_model(emb, per_dir / f"{tag}.emb")
            files.append(f"per_hashtag/{tag}.emb")
    else:
        save_model(model.global_model, bundle_dir / "global.emb")
        files.append("global.emb")

    save_hashtag_vectors(present, bundle_dir / "hashtag_vectors.bin")
    files.append("hashtag_vectors.bin")

    with open(bundle_dir / "cooccurrence.json", "w", encoding="utf-8") as fh:
        json.dump({t: sorted(s) for t, s in model.cooccurrence.items()}, fh, sort_keys=True, indent=2)
        fh.write("\n")
    files.append("cooccurrence.json")
    with open(bundle_dir / "tweet_hashtags.json", "w", encoding="utf-8") as fh:
        json.dump({i: sorted(s) for i, s in model.tweet_hashtags.items()}, fh, sort_keys=True, indent=2)
        fh.write("\n")
    files.append("tweet_hashtags.json")

    manifest = {
        "kind": model.kind,
        "format_version": BUNDLE_FORMAT_VERSION,
        "config": model.config.to_dict(),
        "pipeline_hash": model.pipeline_hash,
        "hashtags": sorted(model.hashtag_vectors),
        "absent": absent,
        "checksums": {name: _sha256(bundle_dir / name) for name in sorted(files)},
    }
    with open(bundle_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_bundle(bundle_dir: str | Path) -> Model1 | Model2:
    bundle_dir = Path(bundle_dir)
    manifest_path = bundle_dir / "manifest.json"
    if not manifest_path.exists():
        raise BundleError(f"{bundle_dir}: no manifest.json; not a model bundle")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format_version") != BUNDLE_FORMAT_VERSION:
        raise BundleError(f"{bundle_dir}: unsupported bundle version")

    for name, expected in manifest["checksums"].items():
        path = bundle_dir / name
        if not path.exists():
            raise BundleError(f"{bundle_dir}: missing bundle file {name}")
        actual = _sha256(path)
        if actual != expected:
            raise BundleError(f"{bundle_dir}: checksum mismatch for {name}")

    cfg = TrainConfig(**manifest["config"])
    vectors: dict[str, np.ndarray | None] = dict(
        load_hashtag_vectors(bundle_dir / "hashtag_vectors.bin")
    )
    for tag in manifest["absent"]:
        vectors[tag] = None
    missing = set(manifest["hashtags"]) - set(vectors)
    if missing:
        raise BundleError(f"{bundle_dir}: hashtags missing vectors or absent marker: {missing}")

    with open(bundle_dir / "cooccurrence.json", encoding="utf-8") as fh:
        cooccurrence = {t: set(s) for t, s in json.load(fh).items()}
    with open(bundle_dir / "tweet_hashtags.json", encoding="utf-8") as fh:
        tweet_hashtags = {i: set(s) for i, s in json.load(fh).items()}

    kind = manifest["kind"]
    if kind == MODEL1:
        embeddings = {}
        per_dir = bundle_dir / "per_hashtag"
        for path in sorted(per_dir.glob("*.emb")):
            embeddings[path.stem] = load_model(path, config=cfg)
        model: Model1 | Model2 = Model1(
            embeddings=embeddings,
            hashtag_vectors=vectors,
            cooccurrence=cooccurrence,
            tweet_hashtags=tweet_hashtags,
            config=cfg,
            pipeline_hash=manifest.get("pipeline_hash", ""),
        )
    elif kind == MODEL2:
        model = Model2(
            global_model=load_model(bundle_dir / "global.emb", config=cfg),
            hashtag_vectors=vectors,
            cooccurrence=cooccurrence,
            tweet_hashtags=tweet_hashtags,
            config=cfg,
            pipeline_hash=manifest.get("pipeline_hash", ""),
        )
    else:
        raise BundleError(f"{bundle_dir}: unknown model kind {kind!r}")
    return model
