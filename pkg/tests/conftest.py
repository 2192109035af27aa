import pytest

from tagrec.corpus import PipelineConfig


@pytest.fixture
def loose_pipeline() -> PipelineConfig:
    """Pipeline config whose frequency filter keeps everything."""
    return PipelineConfig(min_hashtag_freq=1, max_hashtag_freq=10**9)
