"""Engine error types.

Every error carries a stable machine-readable ``code`` so the gateway can map
engine failures to API error documents without string matching. The code set
is closed; tests assert full coverage of the mapping.
"""

from __future__ import annotations

from typing import Any


class KolflowError(Exception):
    """Base class for all engine errors."""

    code = "INTERNAL"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if self.details:
            extras = ", ".join(f"{k}={v!r}" for k, v in sorted(self.details.items()))
            return f"{self.message} ({extras})"
        return self.message


# --- core / artifact store ---------------------------------------------------

class MalformedPayload(KolflowError):
    code = "MALFORMED_PAYLOAD"


class IoFailure(KolflowError):
    code = "IO_FAILURE"


class HashCollisionMismatch(KolflowError):
    code = "HASH_COLLISION"


class NotFound(KolflowError):
    code = "NOT_FOUND"


class TypeMismatch(KolflowError):
    code = "TYPE_MISMATCH"


class HashMismatch(KolflowError):
    code = "HASH_MISMATCH"


# --- registry -----------------------------------------------------------------

class DuplicateServiceId(KolflowError):
    code = "DUPLICATE_SERVICE"


class InvalidDescriptor(KolflowError):
    code = "INVALID_DESCRIPTOR"


class UnknownAlgorithm(KolflowError):
    code = "UNKNOWN_ALGORITHM"


class UnknownService(KolflowError):
    code = "UNKNOWN_SERVICE"


class UnknownPort(KolflowError):
    code = "UNKNOWN_PORT"


class ConflictingRule(KolflowError):
    code = "CONFLICTING_RULE"


class UnknownCapability(KolflowError):
    code = "UNKNOWN_CAPABILITY"


# --- flow ----------------------------------------------------------------------

class BadQuery(KolflowError):
    code = "BAD_QUERY"


class BadDocument(KolflowError):
    code = "BAD_DOCUMENT"


class UnsatisfiableQuery(KolflowError):
    code = "UNSATISFIABLE_QUERY"


class AmbiguousService(KolflowError):
    code = "AMBIGUOUS_SERVICE"


class CyclicConstraints(KolflowError):
    code = "CYCLIC_CONSTRAINTS"


class CycleDetected(KolflowError):
    code = "CYCLE_DETECTED"

    def __init__(self, message: str, cycle: list[str] | None = None, **details: Any):
        super().__init__(message, **details)
        self.cycle = cycle or []


class UnboundPort(KolflowError):
    code = "UNBOUND_PORT"


class AmbiguousExternalInput(KolflowError):
    code = "AMBIGUOUS_INPUT"


# --- executor -------------------------------------------------------------------

class ValidationFailed(KolflowError):
    code = "VALIDATION_FAILED"

    def __init__(self, message: str, violations: list | None = None, **details: Any):
        super().__init__(message, **details)
        self.violations = violations or []


class StoreUnavailable(KolflowError):
    code = "STORE_UNAVAILABLE"


class UnknownRun(KolflowError):
    code = "UNKNOWN_RUN"


class UnknownArtifact(KolflowError):
    code = "UNKNOWN_ARTIFACT"


class AlreadyTerminal(KolflowError):
    code = "ALREADY_TERMINAL"


class BackendError(KolflowError):
    code = "BACKEND_ERROR"


class OutputTypeMismatch(KolflowError):
    code = "OUTPUT_TYPE_MISMATCH"


# --- backends ---------------------------------------------------------------------

class BadParams(KolflowError):
    code = "BAD_PARAMS"


class MalformedInput(KolflowError):
    code = "MALFORMED_INPUT"


class BackendUnreachable(KolflowError):
    code = "BACKEND_UNREACHABLE"


class Timeout(KolflowError):
    code = "TIMEOUT"


class ProtocolError(KolflowError):
    code = "PROTOCOL_ERROR"


class RemoteFault(KolflowError):
    code = "REMOTE_FAULT"

    def __init__(self, fault_code: str, message: str, **details: Any):
        super().__init__(message, fault_code=fault_code, **details)
        self.fault_code = fault_code


class SignatureMismatch(KolflowError):
    code = "SIGNATURE_MISMATCH"


# --- face alignment ------------------------------------------------------------------

class DegenerateLandmarks(KolflowError):
    code = "DEGENERATE_LANDMARKS"


class NonFiniteInput(KolflowError):
    code = "NON_FINITE"


class NonInvertibleTransform(KolflowError):
    code = "NON_INVERTIBLE_TRANSFORM"


class SizeMismatch(KolflowError):
    code = "SIZE_MISMATCH"


# --- gateway ---------------------------------------------------------------------------

class BindFailure(KolflowError):
    code = "BIND_FAILURE"


class BadConfig(KolflowError):
    code = "BAD_CONFIG"
