"""Hashtag recommendation from averaged skip-gram embeddings.

Pipeline: clean and split a microblog corpus, train per-hashtag or global
word embeddings, derive hashtag vectors by averaging, recommend top-K
hashtags for unseen posts by cosine similarity, and evaluate against an
LDA baseline via lift.
"""

from .corpus import (
    CleanTweet,
    CorpusSplit,
    PipelineConfig,
    RawTweet,
    clean,
    extract_hashtags,
    filter_by_hashtag_frequency,
    split_corpus,
)
from .errors import (
    BundleError,
    DataError,
    TagrecError,
    UnscorableTweetError,
    UntrainableDocumentError,
    UsageError,
)
from .evaluate import EvalReport, eval_aloc, eval_muc, lift
from .lda import LdaModel, lda_recommend, lda_train
from .models import (
    HashtagDocument,
    Model1,
    Model2,
    build_hashtag_documents,
    load_bundle,
    save_bundle,
    train_model1,
    train_model2,
)
from .recommend import Recommendation, recommend, recommend_batch, score_model1, score_model2
from .skipgram import (
    EmbeddingModel,
    TrainConfig,
    Vocabulary,
    average,
    build_vocabulary,
    cosine,
    lookup,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "BundleError",
    "CleanTweet",
    "CorpusSplit",
    "DataError",
    "EmbeddingModel",
    "EvalReport",
    "HashtagDocument",
    "LdaModel",
    "Model1",
    "Model2",
    "PipelineConfig",
    "RawTweet",
    "Recommendation",
    "TagrecError",
    "TrainConfig",
    "UnscorableTweetError",
    "UntrainableDocumentError",
    "UsageError",
    "Vocabulary",
    "average",
    "build_hashtag_documents",
    "build_vocabulary",
    "clean",
    "cosine",
    "eval_aloc",
    "eval_muc",
    "extract_hashtags",
    "filter_by_hashtag_frequency",
    "lda_recommend",
    "lda_train",
    "lift",
    "load_bundle",
    "lookup",
    "recommend",
    "recommend_batch",
    "save_bundle",
    "score_model1",
    "score_model2",
    "split_corpus",
    "train",
    "train_model1",
    "train_model2",
]
