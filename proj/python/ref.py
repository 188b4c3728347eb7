"""Reference guest models.

Each class reproduces a native model of the standard library message for
message, so a network can swap one for the other without changing its trace.
"""

from polysim import SimpleModule

KIND_PING = 1
KIND_PONG = 2
KIND_TIMER = 3
KIND_REGISTER = 4


class TicTocGuest(SimpleModule):
    def initialize(self):
        if self.par_bool("starter"):
            self.send(self.new_message("token"), "out")

    def handle_message(self, msg):
        self.send(msg, "out")


class PingClientGuest(SimpleModule):
    def __init__(self):
        super().__init__()
        self.interval = self.par_time("interval")
        self.count = self.par_int("count")
        self.packet_bytes = self.par_int("packetBytes")
        self.next_seq = 0
        self.sent_at = {}
        self.rtts = []

    def initialize(self):
        if self.count > 0:
            self.schedule_at(0, self.new_message("pingTimer", KIND_TIMER))

    def handle_message(self, msg):
        if msg.is_self_message:
            ping = self.new_message("ping", KIND_PING)
            ping.set_attr("seq", self.next_seq)
            ping.byte_length = self.packet_bytes
            self.sent_at[self.next_seq] = self.now()
            self.next_seq += 1
            self.send(ping, "out")
            if self.next_seq < self.count:
                self.schedule_at(self.interval * self.next_seq, msg)
            return
        if msg.kind != KIND_PONG:
            raise RuntimeError("unexpected message " + repr(msg.name))
        seq = msg.attr("seq")
        if seq not in self.sent_at:
            raise RuntimeError("pong with unknown seq %d" % seq)
        self.rtts.append(self.now() - self.sent_at.pop(seq))
        msg.destroy()

    def finish(self):
        self.record_scalar("pings_sent", self.next_seq)
        self.record_scalar("pongs_received", len(self.rtts))
        if not self.rtts:
            return
        self.record_time("rtt_min", min(self.rtts))
        # integer division matches the host's tick arithmetic
        self.record_time("rtt_avg", sum(self.rtts) // len(self.rtts))
        self.record_time("rtt_max", max(self.rtts))


class EchoServerGuest(SimpleModule):
    def initialize(self):
        reg = self.new_message("register", KIND_REGISTER)
        reg.control_info.set_register_protocol(self.par_int("protocolId"))
        self.send(reg, "out")

    def handle_message(self, msg):
        ci = msg.control_info
        ci.set_frame_meta(ci.dst, ci.src, ci.ethertype)
        self.send(msg, "out")
