"""Custom exceptions for the application.

These exceptions are used throughout the pipeline stages, the matcher
backends and the simulated rig. Each carries a human-readable message plus
a ``details`` mapping that ends up in logs, reports and rig error bodies.
"""

from typing import Any


class AppError(Exception):
    """Base exception for all application exceptions."""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        """Initialize exception.

        Args:
            message: Human-readable error message
            details: Additional context about the error
        """
        super().__init__(message)
        self.message = message
        self.details = details or {}


# Domain Exceptions


class DomainError(AppError):
    """Base exception for domain layer errors."""

    pass


class SpecSyntaxError(DomainError):
    """API specification document is malformed."""

    pass


class SchemaError(DomainError):
    """API specification is well-formed but describes no usable endpoint."""

    pass


class AmbiguousEnumError(DomainError):
    """Informal enumeration text yields fewer than two labels."""

    pass


class TableSyntaxError(DomainError):
    """CAN or VV table record is malformed."""

    pass


class DuplicateKeyError(DomainError):
    """Same key appears twice in one table."""

    pass


class GrammarError(DomainError):
    """Pseudocode cell is not an OR-chain of key:label pairs."""

    pass


class UnknownUnitError(DomainError):
    """Unit text is not in the registry."""

    pass


class DimensionMismatchError(DomainError):
    """Units present in one chain measure different quantities."""

    pass


class RoleMissingError(DomainError):
    """Datetime decomposition lacks an hours or minutes target."""

    pass


class EmptyInputError(DomainError):
    """Metric requested over an empty verdict list."""

    pass


class EmptyGroundTruthError(DomainError):
    """Precision/recall requested against an empty ground truth."""

    pass


class ManifestMismatchError(DomainError):
    """Scored results do not belong to the manifest's corpus."""

    pass


# Rig Exceptions


class RigError(DomainError):
    """Base exception for simulated rig errors."""

    pass


class ConfigError(RigError):
    """Rig or pipeline configuration is invalid."""

    pass


class UnknownKeyError(RigError):
    """VV key or API property is not configured on the rig."""

    pass


class UnknownTargetError(RigError):
    """Fault targets an endpoint or key the rig does not know."""

    pass


class RigRequestError(RigError):
    """Gateway request carries a property or value the endpoint cannot take."""

    pass


# Infrastructure Exceptions


class InfrastructureError(AppError):
    """Base exception for infrastructure layer errors."""

    pass


class BindError(InfrastructureError):
    """Rig could not bind its listening socket."""

    pass


class RigUnreachableError(InfrastructureError):
    """Rig did not answer its health check."""

    pass


# Backend Exceptions


class BackendError(InfrastructureError):
    """Base exception for matcher backend errors."""

    pass


class TransportError(BackendError):
    """Network or IO failure talking to the matcher backend."""

    pass


class SchemaViolationError(BackendError):
    """Backend output kept violating its schema after all retries."""

    pass


class ReplayMissError(BackendError):
    """Replay store has no response recorded for a request."""

    pass


# Application Exceptions


class ApplicationError(AppError):
    """Base exception for application layer errors."""

    pass


class StageError(ApplicationError):
    """A pipeline stage failed as a whole."""

    def __init__(self, stage: str, message: str, details: dict[str, Any] | None = None):
        """Initialize exception.

        Args:
            stage: Pipeline stage name (ingest, match, gen, run, report)
            message: Human-readable error message
            details: Additional context about the error
        """
        super().__init__(message, {"stage": stage, **(details or {})})
        self.stage = stage


class ArtifactError(ApplicationError):
    """A stored artifact (plan, report, manifest, run file) cannot be read back."""

    pass
