"""Exception types shared across the engine."""


class MatchError(Exception):
    """Base class for all engine errors."""

    code = "error"


class ParseError(MatchError):
    """A file could not be parsed; the message names the offending line or field."""

    code = "parse_error"


class ValidationError(MatchError):
    """Structurally valid input that violates a domain invariant."""

    code = "validation_error"


class ContractViolation(MatchError):
    """An operation was called outside its stated precondition."""

    code = "contract_violation"


class TransportError(MatchError):
    """A remote embedding provider could not be reached (distinct from OOV)."""

    code = "transport_error"


class NotFoundError(MatchError):
    """A referenced run or candidate does not exist."""

    code = "not_found"


class ConflictError(MatchError):
    """An operation conflicts with earlier state, e.g. re-deciding a candidate."""

    code = "conflict"


class StateError(MatchError):
    """An operation is not allowed in the run's current phase."""

    code = "invalid_state"
