from polysim import _stubs as kernel

_Msg = kernel.Message
_Ci = kernel.Message_ControlInfo

NO_CONTROL_INFO = 0
REGISTER_PROTOCOL = 1
FRAME_META = 2


class ControlInfo:
    """View of the control info attached to a message."""

    __slots__ = ("_h",)

    def __init__(self, handle):
        self._h = handle

    @property
    def kind(self):
        return _Ci.kind(self._h)

    def clear(self):
        _Ci.clear(self._h)

    def set_register_protocol(self, protocol_id):
        _Ci.set_register_protocol(self._h, protocol_id)

    @property
    def protocol_id(self):
        return _Ci.protocol_id(self._h)

    def set_frame_meta(self, src, dst, ethertype):
        _Ci.set_frame_meta(self._h, src, dst, ethertype)

    @property
    def src(self):
        return _Ci.src(self._h)

    @property
    def dst(self):
        return _Ci.dst(self._h)

    @property
    def ethertype(self):
        return _Ci.ethertype(self._h)


class GuestMessage:
    """A message currently in guest hands, addressed through its handle.

    Once the message is sent, scheduled or destroyed the host owns it again
    (or it is gone) and any access raises ``StaleHandleError`` or
    ``HostError``.
    """

    __slots__ = ("_h",)

    def __init__(self, handle):
        self._h = handle

    def __repr__(self):
        return "GuestMessage(handle=%d)" % self._h

    def __eq__(self, other):
        return isinstance(other, GuestMessage) and other._h == self._h

    def __hash__(self):
        return hash(self._h)

    @property
    def handle(self):
        return self._h

    @property
    def id(self):
        return _Msg.id(self._h)

    @property
    def name(self):
        return _Msg.name(self._h)

    @name.setter
    def name(self, value):
        _Msg.set_name(self._h, value)

    @property
    def kind(self):
        return _Msg.kind(self._h)

    @kind.setter
    def kind(self, value):
        _Msg.set_kind(self._h, value)

    @property
    def byte_length(self):
        return _Msg.byte_length(self._h)

    @byte_length.setter
    def byte_length(self, value):
        _Msg.set_byte_length(self._h, value)

    @property
    def creation_time(self):
        return _Msg.creation_time(self._h)

    @property
    def send_time(self):
        return _Msg.send_time(self._h)

    @property
    def arrival_time(self):
        return _Msg.arrival_time(self._h)

    @property
    def is_self_message(self):
        return _Msg.is_self_message(self._h)

    @property
    def arrival_gate(self):
        """(name, index) of the gate it arrived on; index -1 for scalar gates."""
        return _Msg.arrival_gate(self._h), _Msg.arrival_gate_index(self._h)

    def has_attr(self, key):
        return _Msg.has_attr(self._h, key)

    def attr(self, key):
        return _Msg.attr(self._h, key)

    def set_attr(self, key, value):
        _Msg.set_attr(self._h, key, value)

    @property
    def payload(self):
        return bytes.fromhex(_Msg.payload_hex(self._h))

    @payload.setter
    def payload(self, data):
        _Msg.set_payload_hex(self._h, bytes(data).hex())

    @property
    def control_info(self):
        return ControlInfo(self._h)

    def destroy(self):
        _Msg.destroy(self._h)
