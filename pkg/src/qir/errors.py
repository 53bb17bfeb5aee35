"""Exception types shared across the engine."""


class QirError(Exception):
    """Base class for all engine errors."""


class DimensionError(QirError):
    """Operands live in spaces of different dimension."""


class NormalizationError(QirError):
    """A vector or weight list violates its unit/sum-to-one invariant."""


class DegenerateSuperpositionError(QirError):
    """A linear combination collapsed to the zero vector."""


class ParameterError(QirError):
    """A parameter is outside its documented range."""


class ImpossibleMeasurementError(QirError):
    """The observable has (numerically) zero probability under the state.

    The event contradicts the current state; recovery policy is the
    caller's decision.
    """


class SizeError(QirError):
    """Dense expansion requested above the configured dimension bound."""


class IngestError(QirError):
    """Corpus ingestion produced no usable content."""


class EmptyVectorError(QirError):
    """Paragraph has no in-vocabulary terms."""


class EmptyDocumentError(QirError):
    """Document has no usable paragraphs."""


class UnanchorableQueryError(QirError):
    """Query cannot be mapped to a subspace of the corpus."""


class UnknownDocumentError(QirError):
    """Event references a doc_id absent from the corpus."""
