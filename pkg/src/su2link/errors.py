"""Shared exception types."""


class GuardError(ValueError):
    """A numerical guard tripped (dimension limit, degenerate denominator,
    non-Hermitian input where a Hermitian operator is required)."""


class LayoutError(ValueError):
    """A plaquette layout is malformed or references unknown ids."""
