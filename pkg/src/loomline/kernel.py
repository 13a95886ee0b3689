"""Deterministic discrete-event kernel: virtual clock, priority queue, seeded substreams.

The pseudo-random generator is numpy's PCG64, keyed per substream by
SHA-256(seed || label); identical (seed, label) pairs reproduce identical
draw sequences on every platform.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from dataclasses import dataclass, field

import numpy as np

EVENT_KINDS = (
    "arrival",
    "service_start",
    "service_end",
    "error_injected",
    "classified",
    "component_removed",
    "deposited",
)

STATIONS = ("conveyor", "camera", "arm", "laser", "bin")


@dataclass(frozen=True, order=True)
class SimEvent:
    time: float
    seq: int
    kind: str = field(compare=False)
    garment_id: int = field(compare=False)
    station: str = field(compare=False)
    payload: dict = field(compare=False, default_factory=dict)

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "time": f"{self.time:.3f}",
                "seq": self.seq,
                "kind": self.kind,
                "garment_id": self.garment_id,
                "station": self.station,
                "payload": self.payload,
            },
            sort_keys=True,
        )


class SchedulingError(RuntimeError):
    """An event was scheduled behind the virtual clock."""


class EventQueue:
    """Priority queue ordered by (time, insertion sequence)."""

    def __init__(self):
        self._heap: list[SimEvent] = []
        self._next_seq = 0
        self.clock = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(
        self, time: float, kind: str, garment_id: int, station: str, payload: dict | None = None
    ) -> SimEvent:
        if time < self.clock:
            raise SchedulingError(
                f"cannot schedule {kind} at t={time:.3f}: clock already at t={self.clock:.3f}"
            )
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        event = SimEvent(time, self._next_seq, kind, garment_id, station, payload or {})
        self._next_seq += 1
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> SimEvent:
        event = heapq.heappop(self._heap)
        self.clock = event.time
        return event


def run_to_completion(queue: EventQueue, handlers: dict) -> list[SimEvent]:
    """Process events in (time, seq) order until the queue drains; return the trace.

    Each handler receives (event, queue) and may schedule further events,
    but only at or after the current clock.
    """
    trace = []
    while len(queue):
        event = queue.pop()
        trace.append(event)
        handler = handlers.get(event.kind)
        if handler is not None:
            try:
                handler(event, queue)
            except SchedulingError as exc:
                raise SchedulingError(
                    f"handler for {event.kind} at trace position {len(trace) - 1}: {exc}"
                ) from exc
    return trace


def serialize_trace(trace: list[SimEvent]) -> str:
    """JSON-lines rendering, one event per line, times at 3-decimal precision."""
    return "\n".join(e.to_json_line() for e in trace)


def derive_stream(seed: int, label: str) -> np.random.Generator:
    """Independent reproducible substream for (seed, label)."""
    digest = hashlib.sha256(seed.to_bytes(8, "little") + label.encode("utf-8")).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest[:16], "little")))
