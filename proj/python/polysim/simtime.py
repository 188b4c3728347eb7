"""Simulation times cross the boundary as integer ticks (picoseconds)."""

TICKS_PER_SECOND = 10**12


def seconds(n):
    return int(n) * TICKS_PER_SECOND


def millis(n):
    return int(n) * (TICKS_PER_SECOND // 1000)


def micros(n):
    return int(n) * (TICKS_PER_SECOND // 1000000)


def to_seconds(ticks):
    """Float seconds, for display only. Compare ticks, not floats."""
    return ticks / TICKS_PER_SECOND
