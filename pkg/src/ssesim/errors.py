"""Shared exception types."""


class DomainError(ValueError):
    """A parameter lies outside the supported domain of an operation."""
