"""Exception hierarchy shared across the package."""


class TopicViewError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TopicViewError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class InvariantError(TopicViewError):
    """Structurally valid input violates a domain invariant."""


class AllTokensFiltered(TopicViewError):
    """Vocabulary construction removed every token; corpus or filters are degenerate."""


class DegenerateCorpus(TopicViewError):
    """No trainable (center, context) pair exists in the corpus."""


class DimensionMismatch(TopicViewError):
    """Operands have incompatible dimensions."""


class NumericalError(TopicViewError):
    """Training diverged (NaN/Inf); the caller should lower the learning rate."""


class VocabMismatch(TopicViewError):
    """Vocabulary differs from the one the model was trained against."""


class DuplicateTopic(TopicViewError):
    """A topic selection names the same topic twice."""


class InsufficientTopWords(TopicViewError):
    """A topic's ranked word list is shorter than the requested top-n."""


class SafetyRejected(TopicViewError):
    """Image backend refused the prompt on content-policy grounds."""


class RequestFailed(TopicViewError):
    """Image backend answered but could not produce an image."""


class TransportError(TopicViewError):
    """Image backend could not be reached at all."""


class BackendUnreachable(TopicViewError):
    """Every request in an image batch failed at the transport level."""


class ConfigError(TopicViewError):
    """Configuration file is missing, malformed, or points at missing artifacts."""


class ArtifactMismatch(TopicViewError):
    """Stored artifacts (vocabulary, embeddings, model) are mutually inconsistent."""
