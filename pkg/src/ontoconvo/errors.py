"""Exception hierarchy shared across the package."""


class OntoConvoError(Exception):
    """Base class for all package errors."""


class BlankInput(OntoConvoError):
    """Raised when a text operation receives input with no word tokens."""


class EmptyNode(OntoConvoError):
    """Raised when impurity is requested for an empty label multiset."""


class EmptyDataset(OntoConvoError):
    """Raised when tree fitting receives no samples."""


class UnknownLabel(OntoConvoError):
    """Raised when a sample label is outside the declared label set."""


class UnknownClass(OntoConvoError):
    """Raised when a class name is not part of the ontology."""


class UnknownDescriptor(OntoConvoError):
    """Raised when a rule references an undeclared descriptor."""


class EmptyRuleSet(OntoConvoError):
    """Raised when an ontology declares no rules."""


class OntologySyntaxError(OntoConvoError):
    """Raised when an ontology or strategy document fails to parse."""


class NoRuleMatches(OntoConvoError):
    """Raised when no rule covers the given descriptor values."""


class AmbiguousMatch(OntoConvoError):
    """Raised when rules with different labels match the same values."""


class ReservedPattern(OntoConvoError):
    """Raised when an utterance contains the control-code bracket pattern."""


class UnannotatedRecord(OntoConvoError):
    """Raised when balancing or wrapping meets a record without a class."""


class BackendUnavailable(OntoConvoError):
    """Raised when a remote classifier backend keeps failing after retry."""


class UnknownTemplate(OntoConvoError):
    """Raised when a prompt template id is not registered."""


class GatewayError(OntoConvoError):
    """Base class for completion-gateway failures; carries the request id."""

    def __init__(self, message: str, request_id: str | None = None):
        super().__init__(message)
        self.request_id = request_id


class GatewayTimeout(GatewayError):
    """Completion request timed out (after the configured retry)."""


class HttpError(GatewayError):
    """Completion endpoint answered with a non-success status."""

    def __init__(self, status: int, request_id: str | None = None):
        super().__init__(f"endpoint returned HTTP {status}", request_id)
        self.status = status


class MalformedResponse(GatewayError):
    """Completion endpoint answered with an unusable body."""


class EmptyPairs(OntoConvoError):
    """Raised when a metric is requested over zero label pairs."""


class NotOrdinal(OntoConvoError):
    """Raised when ordinal MAE is requested for a non-ordinal ontology."""
