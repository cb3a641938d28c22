from .gaussian import GaussianTarget, make_covariance
from .ising import IsingDenoiseTarget, corrupt_image, ising_flip_probability, make_shapes_image
from .lda import CollapsedLda, LdaDocumentBlocks, make_bars_corpus, bars_topics

__all__ = [
    "GaussianTarget",
    "make_covariance",
    "IsingDenoiseTarget",
    "corrupt_image",
    "ising_flip_probability",
    "make_shapes_image",
    "CollapsedLda",
    "LdaDocumentBlocks",
    "make_bars_corpus",
    "bars_topics",
]
