"""Randomized (degree+1)-coloring state machines.

Payloads are small tuples ``(tag, color)``:

* ``("f", c)`` fixed color of a colored node,
* ``("t", c)`` tentative color of an uncolored node,
* ``("s", 0)`` start note of an uncolored dynamic-coloring instance.

On the wire each payload is one tag byte followed by a little-endian u32.
"""

from __future__ import annotations

import struct

from dynanet.engine import RoundInputs
from dynanet.rng import Stream

FIXED = "f"
TENTATIVE = "t"
START = "s"

_WIRE = struct.Struct("<cI")


class PaletteExhausted(RuntimeError):
    """An uncolored node ran out of colors; the palette-size invariant was violated."""


class ColorCodec:
    def encode(self, payload) -> bytes:
        tag, color = payload
        return _WIRE.pack(tag.encode(), color)

    def decode(self, data: bytes):
        tag, color = _WIRE.unpack(data)
        return (tag.decode(), color)


def _pick(palette: set[int], rng: Stream) -> int:
    ordered = sorted(palette)
    return ordered[rng.below(len(ordered))]


class DColor:
    """Dynamic coloring instance; communication restricted to the running intersection graph.

    The first round is the start round: the node announces its input color and,
    if uncolored, initializes its palette to ``[d + 1]`` minus the colors its
    current neighbors announce. Colors are never added back to the palette and a
    color, once taken, is kept.

    Once colored the instance ignores incoming messages, so
    ``intersection_neighbors`` stops being updated from that point on.
    """

    __slots__ = (
        "phi",
        "input_phi",
        "palette",
        "intersection_neighbors",
        "tentative",
        "started",
        "settled",
    )

    def __init__(self, phi: int | None = None) -> None:
        self.phi = phi
        self.input_phi = phi
        self.palette: set[int] = set()
        self.intersection_neighbors: set[int] | None = None
        self.tentative: int | None = None
        self.started = False
        # payload repeated forever once colored; None while there is work left
        self.settled = None if phi is None else (FIXED, phi)

    @property
    def output(self) -> int | None:
        return self.phi

    def send(self, rng: Stream):
        if self.settled is not None:
            return self.settled
        if not self.started:
            return (START, 0)
        self.tentative = _pick(self.palette, rng)
        return (TENTATIVE, self.tentative)

    def receive(self, inputs: RoundInputs) -> int | None:
        received = inputs.received
        if not self.started:
            self.started = True
            self.intersection_neighbors = {u for u, _ in received}
            if self.phi is None:
                taken = {c for _, (tag, c) in received if tag == FIXED}
                self.palette = set(range(1, inputs.current_degree + 2)) - taken
            return self.phi
        if self.phi is not None:
            return self.phi

        keep = self.intersection_neighbors
        fixed = set()
        tentative = set()
        seen = set()
        for u, (tag, c) in received:
            if u not in keep:
                continue
            seen.add(u)
            if tag == FIXED:
                fixed.add(c)
            elif tag == TENTATIVE:
                tentative.add(c)
        self.intersection_neighbors = seen
        self.palette -= fixed
        if self.tentative in self.palette and self.tentative not in tentative:
            self.phi = self.tentative
            self.settled = (FIXED, self.phi)
        elif not self.palette:
            raise PaletteExhausted(f"empty palette with {len(seen)} intersection neighbors")
        return self.phi


class SColor:
    """Network-static coloring: talks over the current graph and may uncolor.

    The palette is rebuilt every round as ``[d_r + 1]`` minus the fixed colors
    heard this round, so colors can rejoin it.
    """

    __slots__ = ("phi", "palette", "tentative")

    uncolors = True

    def __init__(self, phi: int | None = None) -> None:
        self.phi = phi
        self.palette: set[int] = {1}
        self.tentative: int | None = None

    @property
    def output(self) -> int | None:
        return self.phi

    def send(self, rng: Stream):
        if self.phi is not None:
            return (FIXED, self.phi)
        self.tentative = _pick(self.palette, rng)
        return (TENTATIVE, self.tentative)

    def receive(self, inputs: RoundInputs) -> int | None:
        fixed = set()
        tentative = set()
        for _, (tag, c) in inputs.received:
            if tag == FIXED:
                fixed.add(c)
            elif tag == TENTATIVE:
                tentative.add(c)
        self.palette = set(range(1, inputs.current_degree + 2)) - fixed
        if self.phi is None:
            if self.tentative in self.palette and self.tentative not in tentative:
                self.phi = self.tentative
        elif self.uncolors and self.phi not in self.palette:
            self.phi = None
        return self.phi


class BasicColoring(SColor):
    """The static baseline: same round as SColor without the uncoloring case."""

    __slots__ = ()

    uncolors = False
