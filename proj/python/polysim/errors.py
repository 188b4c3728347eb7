"""Exception types raised by host calls.

Inside the simulator these are the classes the host registers. In a plain
interpreter (tests, documentation builds) stand-ins with the same hierarchy
are used so ``except StaleHandleError`` still works.
"""

try:
    from _polysim_host import HostError, StaleHandleError
except ImportError:
    class HostError(RuntimeError):
        """A kernel export rejected a call."""

    class StaleHandleError(HostError):
        """The handle refers to an object that no longer exists."""
