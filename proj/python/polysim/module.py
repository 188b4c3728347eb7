from polysim import _stubs as kernel
from polysim.message import GuestMessage

SCALAR_GATE = -1


class SimpleModule(kernel.SimpleModuleBase):
    """Convenience layer over the generated base class.

    The base constructor binds this object to its host module, so parameters
    and gates are usable right after ``super().__init__()`` returns.
    """

    # -- time and messages

    def now(self):
        return kernel.now()

    def new_message(self, name, kind=0):
        return GuestMessage(kernel.Message.create(self.host_handle, name, kind))

    def dup(self, msg):
        return GuestMessage(kernel.Message.dup(self.host_handle, msg.handle))

    def send(self, msg, gate, index=SCALAR_GATE, priority=0):
        kernel.send(self.host_handle, msg.handle, gate, index, priority)

    def schedule_at(self, t, msg, priority=0):
        kernel.schedule_at(self.host_handle, t, msg.handle, priority)

    def cancel_event(self, msg):
        return GuestMessage(kernel.cancel_event(self.host_handle, msg.handle))

    # -- parameters

    def has_par(self, name):
        return kernel.has_parameter(self.host_handle, name)

    def par_int(self, name):
        return kernel.get_parameter_int(self.host_handle, name)

    def par_double(self, name):
        return kernel.get_parameter_double(self.host_handle, name)

    def par_string(self, name):
        return kernel.get_parameter_string(self.host_handle, name)

    def par_bool(self, name):
        return kernel.get_parameter_bool(self.host_handle, name)

    def par_time(self, name):
        return kernel.get_parameter_time(self.host_handle, name)

    # -- gates

    def has_gate(self, name, index=SCALAR_GATE):
        return kernel.gate_lookup(self.host_handle, name, index)

    def gate_connected(self, name, index=SCALAR_GATE):
        return kernel.gate_connected(self.host_handle, name, index)

    def gate_size(self, name):
        return kernel.gate_size(self.host_handle, name)

    # -- results, logging, randomness

    def record_scalar(self, name, value):
        """Ints and floats are recorded as such; use record_time for times."""
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError("record_scalar needs an int or float, got " + type(value).__name__)
        if isinstance(value, int):
            kernel.record_scalar_int(self.host_handle, name, value)
        else:
            kernel.record_scalar(self.host_handle, name, value)

    def record_time(self, name, ticks):
        kernel.record_scalar_time(self.host_handle, name, ticks)

    def log(self, text):
        kernel.log(self.host_handle, text)

    @property
    def path(self):
        return kernel.module_path(self.host_handle)

    def uniform(self):
        return kernel.rand_uniform(self.host_handle)

    def below(self, n):
        return kernel.rand_below(self.host_handle, n)

    def _on_host_call(self, which, msg):
        if which == "handle_message":
            self.handle_message(GuestMessage(msg))
        else:
            super()._on_host_call(which, msg)
