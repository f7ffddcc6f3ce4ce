"""Concat: one network-static instance feeding a rolling window of dynamic instances."""

from __future__ import annotations

import struct
from collections import deque
from typing import Any, Callable

from dynanet.engine import Codec, RoundInputs
from dynanet.rng import Stream


class Concat:
    """Per-node combiner.

    Every round a new dynamic instance is started on the static instance's
    previous output; the window keeps at most ``T1 - 1`` dynamic instances and
    the node outputs the oldest one. Instances are addressed by their age in
    rounds, which lines up across nodes without a global clock: the composite
    payload is ``(static_payload, (age0_payload, age1_payload, ...))``. A peer
    that woke later simply has a shorter tuple, so messages for instances it
    never started are absent.
    """

    def __init__(self, salg: Any, dalg_factory: Callable[[Any], Any], T1: int) -> None:
        if T1 < 2:
            raise ValueError("T1 must be at least 2")
        self.salg = salg
        self.dalg_factory = dalg_factory
        self.T1 = T1
        self.instances: deque = deque()
        self.phi_prev = None
        self.salg_output = None

    @property
    def oldest(self):
        return self.instances[0]

    def send(self, rng: Stream):
        self.instances.append(self.dalg_factory(self.phi_prev))
        if len(self.instances) > self.T1 - 1:
            self.instances.popleft()
        static_payload = self.salg.send(rng)
        parts = tuple(
            [
                inst.settled if inst.settled is not None else inst.send(rng)
                for inst in reversed(self.instances)
            ]
        )
        return (static_payload, parts)

    def receive(self, inputs: RoundInputs):
        received = inputs.received
        degree = inputs.current_degree
        rng = inputs.rng
        static_msgs = [(u, m[0]) for u, m in received if m[0] is not None]
        self.salg_output = self.salg.receive(RoundInputs(static_msgs, degree, rng))
        for age, inst in enumerate(reversed(self.instances)):
            if inst.settled is not None:
                continue
            msgs = [(u, m[1][age]) for u, m in received if len(m[1]) > age and m[1][age] is not None]
            inst.receive(RoundInputs(msgs, degree, rng))
        self.phi_prev = self.salg_output
        return self.instances[0].output

    def instance_by_age(self, age: int):
        """Instance started ``age`` rounds ago, or None if this node never started it."""
        if age >= len(self.instances):
            return None
        return self.instances[len(self.instances) - 1 - age]


class ConcatCodec:
    """Length-prefixed list: static part, instance count, then each instance part.

    A length of 0xFFFF encodes an absent (silent) payload.
    """

    NONE = 0xFFFF

    def __init__(self, static_codec: Codec, dynamic_codec: Codec) -> None:
        self.static_codec = static_codec
        self.dynamic_codec = dynamic_codec

    def _part(self, codec: Codec, payload) -> bytes:
        if payload is None:
            return struct.pack("<H", self.NONE)
        data = codec.encode(payload)
        return struct.pack("<H", len(data)) + data

    def encode(self, payload) -> bytes:
        static_payload, parts = payload
        out = [self._part(self.static_codec, static_payload), struct.pack("<H", len(parts))]
        out.extend(self._part(self.dynamic_codec, p) for p in parts)
        return b"".join(out)

    def _read(self, codec: Codec, data: bytes, pos: int):
        (size,) = struct.unpack_from("<H", data, pos)
        pos += 2
        if size == self.NONE:
            return None, pos
        return codec.decode(data[pos : pos + size]), pos + size

    def decode(self, data: bytes):
        static_payload, pos = self._read(self.static_codec, data, 0)
        (count,) = struct.unpack_from("<H", data, pos)
        pos += 2
        parts = []
        for _ in range(count):
            p, pos = self._read(self.dynamic_codec, data, pos)
            parts.append(p)
        return (static_payload, tuple(parts))
