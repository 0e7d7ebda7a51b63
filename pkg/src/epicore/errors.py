"""Shared exception types, mapped to CLI exit codes."""


class EpicoreError(Exception):
    """Base class for package errors."""


class InvalidInputError(EpicoreError, ValueError):
    """Malformed or inconsistent input (exit code 1)."""


class VerificationFailure(EpicoreError):
    """A checked claim does not hold on the given input (exit code 2)."""


class UnsupportedSizeError(EpicoreError):
    """Input exceeds the guarded enumeration limits (exit code 3)."""
