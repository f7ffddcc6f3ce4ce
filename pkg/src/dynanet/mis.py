"""Maximal independent set state machines.

Outputs are ``"M"`` (in the MIS), ``"D"`` (dominated) or None (undecided).

Payloads:

* ``("m",)`` mark, sent by MIS nodes,
* ``("d",)`` dominated note (DMis only, keeps neighbor tracking exact),
* ``("a", x)`` DMis random draw, ``x`` a u64 read as a point of [0, 1),
* ``("u", p, cand)`` SMis undecided node with desire-level ``p`` and candidate flag.

Wire format: one tag byte, then for ``a`` a u64, for ``u`` numerator and
denominator of ``p`` as u64 plus one candidate byte.
"""

from __future__ import annotations

import struct
from fractions import Fraction

from dynanet.engine import RoundInputs
from dynanet.rng import Stream

MIS = "M"
DOMINATED = "D"

MARK = ("m",)
DOM_NOTE = ("d",)

HALF = Fraction(1, 2)

_SETTLED = {MIS: MARK, DOMINATED: DOM_NOTE}


class MisCodec:
    def encode(self, payload) -> bytes:
        tag = payload[0]
        if tag == "a":
            return b"a" + struct.pack("<Q", payload[1])
        if tag == "u":
            p = payload[1]
            return b"u" + struct.pack("<QQ?", p.numerator, p.denominator, payload[2])
        return tag.encode()

    def decode(self, data: bytes):
        tag = data[:1].decode()
        if tag == "a":
            return ("a", struct.unpack("<Q", data[1:])[0])
        if tag == "u":
            num, den, cand = struct.unpack("<QQ?", data[1:])
            return ("u", Fraction(num, den), cand)
        return (tag,)


class DMis:
    """Pipelined Luby on the running intersection graph.

    MIS and dominated are absorbing. A node joins the MIS when its draw is
    strictly below every draw it heard from undecided intersection neighbors;
    a mark takes precedence and makes it dominated instead. Equal draws block
    both nodes for that round.
    """

    __slots__ = ("state", "input_state", "intersection_neighbors", "alpha", "settled")

    def __init__(self, state: str | None = None) -> None:
        self.state = state
        self.input_state = state
        self.intersection_neighbors: set[int] | None = None
        self.alpha: int | None = None
        self.settled = _SETTLED.get(state)

    @property
    def output(self) -> str | None:
        return self.state

    def send(self, rng: Stream):
        if self.settled is not None:
            return self.settled
        self.alpha = rng.u64()
        return ("a", self.alpha)

    def receive(self, inputs: RoundInputs) -> str | None:
        if self.state is not None:
            return self.state
        keep = self.intersection_neighbors
        marked = False
        lowest = None
        seen = set()
        for u, msg in inputs.received:
            if keep is not None and u not in keep:
                continue
            seen.add(u)
            tag = msg[0]
            if tag == "m":
                marked = True
            elif tag == "a" and (lowest is None or msg[1] < lowest):
                lowest = msg[1]
        self.intersection_neighbors = seen
        if marked:
            self.state = DOMINATED
        elif lowest is None or self.alpha < lowest:
            self.state = MIS
        self.settled = _SETTLED.get(self.state)
        return self.state


class SMis:
    """Desire-level MIS over the current graph; nodes may leave MIS or domination.

    The desire-level stays in [1/(5n), 1/2] and is only updated while the node
    is undecided.
    """

    __slots__ = ("state", "p", "floor", "candidate", "delta")

    def __init__(self, n: int, state: str | None = None) -> None:
        self.state = state
        self.p = HALF
        self.floor = Fraction(1, 5 * n)
        self.candidate = False
        self.delta = Fraction(0)

    @property
    def output(self) -> str | None:
        return self.state

    def send(self, rng: Stream):
        if self.state == MIS:
            return MARK
        if self.state == DOMINATED:
            return None
        self.candidate = rng.bernoulli(self.p)
        return ("u", self.p, self.candidate)

    def receive(self, inputs: RoundInputs) -> str | None:
        marked = False
        other_candidate = False
        delta = Fraction(0)
        for _, msg in inputs.received:
            tag = msg[0]
            if tag == "m":
                marked = True
            elif tag == "u":
                delta += msg[1]
                if msg[2]:
                    other_candidate = True
        state = self.state
        if state is None:
            self.delta = delta
            if delta >= 2:
                self.p = max(self.p / 2, self.floor)
            else:
                self.p = min(2 * self.p, HALF)
            if marked:
                self.state = DOMINATED
            elif self.candidate and not other_candidate:
                self.state = MIS
        elif state == MIS:
            if marked:
                self.state = None
        elif not marked:
            self.state = None
        self.candidate = False
        return self.state
