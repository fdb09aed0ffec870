"""Decoding schedules: the ordered list of subtrees a trial visits.

Plain SC visits N single-bit leaves. Fast-SSC replaces whole subtrees by
R0 / R1 / REP / SPC nodes that are decoded in one step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from polarflip._kernels import LEAF, R0, R1, REP, SPC
from polarflip.construction import PolarCode

__all__ = [
    "ScheduleEntry",
    "NodeSchedule",
    "KIND_CODES",
    "NODE_CAPS",
    "leaf_schedule",
    "build_schedule",
]

KIND_CODES = {"LEAF": LEAF, "R0": R0, "R1": R1, "REP": REP, "SPC": SPC}

# Largest node length per kind; SPC depends on the flip order omega.
NODE_CAPS = {"REP": 32, "R1": 64, "SPC": {1: 64, 2: 8, 3: 4}}
MIN_NODE = 4


@dataclass(frozen=True)
class ScheduleEntry:
    kind: str
    start: int
    length: int

    @property
    def stage(self) -> int:
        return self.length.bit_length() - 1

    @property
    def stop(self) -> int:
        return self.start + self.length


class NodeSchedule:
    """Immutable tiling of [0, N) by decoding nodes, in decoding order."""

    def __init__(self, N: int, entries, omega: int | None = None):
        self.N = int(N)
        self.omega = omega
        self.entries = tuple(entries)
        pos = 0
        for e in self.entries:
            if e.start != pos or e.start % e.length:
                raise ValueError(f"schedule entry {e} breaks the tiling")
            pos = e.stop
        if pos != self.N:
            raise ValueError("schedule does not cover [0, N)")
        self.kinds = np.array([KIND_CODES[e.kind] for e in self.entries], dtype=np.int64)
        self.starts = np.array([e.start for e in self.entries], dtype=np.int64)
        self.stages = np.array([e.stage for e in self.entries], dtype=np.int64)
        owner = np.repeat(np.arange(len(self.entries)), [e.length for e in self.entries])
        self.node_of = owner
        for arr in (self.kinds, self.starts, self.stages, self.node_of):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def q(self) -> int:
        """Number of special (non-leaf) nodes."""
        return sum(e.kind != "LEAF" for e in self.entries)

    def entry_at(self, pos: int) -> ScheduleEntry:
        return self.entries[int(self.node_of[pos])]

    def index_at(self, pos: int) -> int:
        return int(self.node_of[pos])

    def is_special(self, pos: int) -> bool:
        return self.entry_at(pos).kind != "LEAF"

    def anchor(self, pos: int) -> int:
        """Start of the node containing ``pos`` (N stays N)."""
        if pos >= self.N:
            return self.N
        return self.entry_at(pos).start

    def dump(self) -> str:
        """One line per entry, consecutive leaves collapsed into a range."""
        lines = []
        run = None
        for e in self.entries:
            if e.kind == "LEAF":
                run = (run[0], e.stop) if run else (e.start, e.stop)
                continue
            if run:
                lines.append(f"LEAF {run[0]}-{run[1] - 1}")
                run = None
            lines.append(f"{e.kind} {e.start}-{e.stop - 1} len={e.length}")
        if run:
            lines.append(f"LEAF {run[0]}-{run[1] - 1}")
        return "\n".join(lines)


@lru_cache(maxsize=32)
def leaf_schedule(N: int) -> NodeSchedule:
    return NodeSchedule(N, [ScheduleEntry("LEAF", i, 1) for i in range(N)])


def _match(bits: np.ndarray, omega: int) -> str | None:
    size = bits.shape[0]
    if size < MIN_NODE:
        return None
    ones = int(bits.sum())
    if ones == 0:
        return "R0"
    if ones == size and size <= NODE_CAPS["R1"]:
        return "R1"
    if ones == 1 and bits[-1] and size <= NODE_CAPS["REP"]:
        return "REP"
    if ones == size - 1 and not bits[0] and size <= NODE_CAPS["SPC"][omega]:
        return "SPC"
    return None


def build_schedule(code: PolarCode, omega: int = 1) -> NodeSchedule:
    """Greedy top-down decomposition: the largest matching subtree wins."""
    if omega not in NODE_CAPS["SPC"]:
        raise ValueError(f"omega must be 1, 2 or 3, got {omega}")
    mask = code.info_mask
    entries: list[ScheduleEntry] = []

    def visit(start: int, size: int):
        kind = _match(mask[start: start + size], omega)
        if kind is not None:
            entries.append(ScheduleEntry(kind, start, size))
        elif size == 1:
            entries.append(ScheduleEntry("LEAF", start, 1))
        else:
            half = size // 2
            visit(start, half)
            visit(start + half, half)

    visit(0, code.N)
    return NodeSchedule(code.N, entries, omega)
