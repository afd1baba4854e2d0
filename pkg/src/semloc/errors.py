"""Exception and warning types shared across the pipeline."""


class SemlocError(Exception):
    """Base class for all semloc errors."""


class DegenerateCloud(SemlocError):
    """Point cloud has too few points or is rank-deficient; the
    observation should be dropped rather than fitted."""


class MissingEmbedding(SemlocError):
    """An appearance embedding was requested but is not available.

    Raised only when the descriptor weight makes embeddings mandatory
    (alpha == 1); otherwise the pair is flagged and contributes zero.
    """


class DegenerateGeometry(SemlocError):
    """Correspondence points are collinear; rotation about the line is
    unobservable."""


class InsufficientPairs(SemlocError):
    """Fewer than three positive-weight correspondences."""


class EmptyHypothesisSet(SemlocError):
    """No clique of the minimum size exists; no pose can be proposed."""


class NoSolvableHypothesis(SemlocError):
    """Every candidate correspondence set failed pose solving."""


class NoConsensus(SemlocError):
    """Sample consensus never reached the minimum inlier count."""


class ParseError(SemlocError):
    """A map/observation/embedding file is malformed.

    Carries human-readable location context (field path or line)."""


class SchemaWarning(UserWarning):
    """Unknown or ignored fields in an input file."""
