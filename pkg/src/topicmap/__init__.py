"""Topic modelling and topic-network analysis of document collections.

Pipeline: ingest -> filter_english -> preprocess_corpus -> lda.train ->
topic_similarity -> build_graph -> louvain, with file exports in ``report``.
"""

__version__ = "0.1.0"

from .corpus import Corpus, RawDocument, filter_english, ingest, stats  # noqa: E402
from .errors import DataError, InvariantError, PipelineError, TopicMapError  # noqa: E402
from .lda import Hyperparams, TopicModel, train  # noqa: E402
from .preprocess import EncodedCorpus, PreprocessConfig, normalize, preprocess_corpus  # noqa: E402
from .stemmer import stem  # noqa: E402

__all__ = ["Corpus", "RawDocument", "ingest", "filter_english", "stats",
           "PreprocessConfig", "EncodedCorpus", "normalize", "preprocess_corpus", "stem",
           "Hyperparams", "TopicModel", "train",
           "TopicMapError", "DataError", "InvariantError", "PipelineError"]
