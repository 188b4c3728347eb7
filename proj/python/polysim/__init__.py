"""Guest SDK for writing polysim simple modules in Python.

Subclass :class:`SimpleModule`, override ``initialize``, ``handle_message``
and ``finish``, and refer to the class from a topology file with
``@class("guest:<module>.<Class>")``. Objects are created by the simulator;
constructing one in a plain Python program raises ``RuntimeError``.

Guest code runs on the simulator's event-loop thread only. Do not touch SDK
objects from threads you start yourself.
"""

from polysim import _stubs as kernel
from polysim.errors import HostError, StaleHandleError
from polysim.message import ControlInfo, GuestMessage
from polysim.module import SimpleModule
from polysim.simtime import TICKS_PER_SECOND, micros, millis, seconds, to_seconds

__all__ = [
    "ControlInfo",
    "GuestMessage",
    "HostError",
    "SimpleModule",
    "StaleHandleError",
    "TICKS_PER_SECOND",
    "kernel",
    "micros",
    "millis",
    "seconds",
    "to_seconds",
]
