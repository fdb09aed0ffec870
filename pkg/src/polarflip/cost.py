"""Analytic cycle-count and memory models for semi-parallel SC-based decoders.

All quantities are exact integers. A decoder has ``P`` processing elements;
computing the 2^s LLRs (or 2^s partial sums) of one node costs
``ceil(2^s / P)`` (resp. ``ceil(2^s / 2P)``) clock cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

from polarflip.construction import PolarCode, is_power_of_two

__all__ = [
    "CostParams",
    "MemoryReport",
    "BASELINES",
    "llr_cycles",
    "ps_cycles",
    "node_cycles",
    "sc_cycles",
    "skipped_llr_cycles",
    "skipped_ps_cycles",
    "restoration_cycles",
    "sc_restart_saving",
    "lrt_saving",
    "fast_node_saving",
    "fssc_cumulative_savings",
    "trial_cost",
    "restart_saving",
    "memory_estimate",
]

BASELINES = ("sc", "sclrt", "fssc")


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class CostParams:
    """Processing elements and the quantization widths used by the memory model."""

    P: int = 64
    Q_ch: int = 6
    Q_int: int = 7
    Q_flip: int = 7

    def __post_init__(self):
        if self.P < 1:
            raise ValueError("P must be >= 1")
        if min(self.Q_ch, self.Q_int, self.Q_flip) < 1:
            raise ValueError("quantization widths must be >= 1")


def _log2(N: int) -> int:
    if not is_power_of_two(N):
        raise ValueError(f"length must be a power of two, got {N}")
    return N.bit_length() - 1


def llr_cycles(N: int, P: int) -> int:
    """Cycles for every f/g evaluation of a length-N SC tree."""
    n = _log2(N)
    return sum((1 << (n - s)) * _ceil_div(1 << s, P) for s in range(n))


def ps_cycles(N: int, P: int, *, full: bool = False) -> int:
    """Cycles for the partial-sum updates of a length-N tree.

    The right-most node of each stage never feeds a g-function, so it is
    skipped unless ``full`` is set (a subtree inside a larger tree must
    forward its partial sums to the parent).
    """
    n = _log2(N)
    skip = 0 if full else 1
    return sum(((1 << (n - s)) - skip) * _ceil_div(1 << s, 2 * P) for s in range(1, n))


def node_cycles(N_v: int, P: int) -> int:
    """SC cost of a length-N_v subtree embedded in a larger tree."""
    return llr_cycles(N_v, P) + ps_cycles(N_v, P, full=True)


def sc_cycles(N: int, P: int) -> int:
    return llr_cycles(N, P) + ps_cycles(N, P)


def _check_psi(psi: int, N: int) -> int:
    psi = int(psi)
    if not 0 <= psi <= N:
        raise ValueError(f"restart index {psi} outside [0, {N}]")
    return psi


def skipped_llr_cycles(psi: int, N: int, P: int) -> int:
    """LLR cycles of all stage-s nodes lying entirely left of leaf psi."""
    n = _log2(N)
    psi = _check_psi(psi, N)
    return sum((psi >> s) * _ceil_div(1 << s, P) for s in range(n))


def skipped_ps_cycles(psi: int, N: int, P: int) -> int:
    n = _log2(N)
    psi = _check_psi(psi, N)
    return sum((psi >> s) * _ceil_div(1 << s, 2 * P) for s in range(1, n))


def restoration_cycles(psi: int, N: int, P: int) -> int:
    """Re-encoding cost of the partial sums on psi's restart path.

    A stage-s restoration is a size-2^s polar encoder with s layers.
    """
    n = _log2(N)
    psi = _check_psi(psi, N)
    return sum(((psi >> s) & 1) * _ceil_div(1 << s, 2 * P) * s for s in range(1, n))


def sc_restart_saving(psi: int, N: int, P: int) -> int:
    if psi >= N:
        return sc_cycles(N, P)
    return (skipped_llr_cycles(psi, N, P) + skipped_ps_cycles(psi, N, P)
            - restoration_cycles(psi, N, P))


def lrt_saving(code: PolarCode, P: int) -> int:
    """Cycles skipped by starting at the first information bit.

    Every partial sum left of a0 is zero, so nothing needs restoring.
    """
    a0 = code.a0
    return skipped_llr_cycles(a0, code.N, P) + skipped_ps_cycles(a0, code.N, P)


def _fast_cost(kind: str, N_v: int, P: int) -> int:
    return 1 if kind == "R0" else _ceil_div(N_v, P)


def fast_node_saving(kind: str, N_v: int, P: int) -> int:
    """Cycles saved by decoding one special node directly instead of by SC."""
    return node_cycles(N_v, P) - _fast_cost(kind, N_v, P)


def _special_nodes(schedule):
    return [(e.kind, e.start, e.length) for e in schedule.entries if e.kind != "LEAF"]


def fssc_cumulative_savings(schedule, P: int) -> tuple[list[int], list[int]]:
    """(end positions, cumulative savings) over the schedule's special nodes."""
    ends, cum, total = [], [], 0
    for kind, start, length in _special_nodes(schedule):
        total += fast_node_saving(kind, length, P)
        ends.append(start + length)
        cum.append(total)
    return ends, cum


def _fssc_saving_left_of(psi: int, schedule, P: int) -> int:
    ends, cum = fssc_cumulative_savings(schedule, P)
    acc = 0
    for end, c in zip(ends, cum):
        if end > psi:
            break
        acc = c
    return acc


def trial_cost(baseline: str, code: PolarCode, params: CostParams, schedule=None) -> int:
    """Cycles of one complete decoding trial for the given baseline."""
    base = sc_cycles(code.N, params.P)
    if baseline == "sc":
        return base
    if baseline == "sclrt":
        return base - lrt_saving(code, params.P)
    if baseline == "fssc":
        if schedule is None:
            raise ValueError("the fssc baseline needs a node schedule")
        return base - sum(fast_node_saving(k, z, params.P) for k, _, z in _special_nodes(schedule))
    raise ValueError(f"unknown baseline {baseline!r}")


def restart_saving(baseline: str, psi: int, code: PolarCode, params: CostParams,
                   schedule=None, *, mechanism: str = "grm") -> int:
    """Cycles a trial restarted at psi saves against a full ``baseline`` trial.

    ``psi == N`` marks a flip on the last information bit: no tree is
    traversed and the whole trial is saved. The result is clamped to
    ``[0, trial_cost]``.
    """
    N, P = code.N, params.P
    psi = _check_psi(psi, N)
    full = trial_cost(baseline, code, params, schedule)
    if psi >= N:
        return full
    if mechanism == "lrt":
        saving = lrt_saving(code, P) if psi == code.a0 else sc_restart_saving(psi, N, P)
    else:
        saving = sc_restart_saving(psi, N, P)
    if baseline == "sclrt":
        saving -= lrt_saving(code, P)
    elif baseline == "fssc":
        if schedule is None:
            raise ValueError("the fssc baseline needs a node schedule")
        saving -= _fssc_saving_left_of(psi, schedule, P)
    elif baseline != "sc":
        raise ValueError(f"unknown baseline {baseline!r}")
    return min(max(saving, 0), full)


@dataclass(frozen=True)
class MemoryReport:
    sc_bits: int
    flip_bits: int
    restart_bits: int

    @property
    def total(self) -> int:
        return self.sc_bits + self.flip_bits + self.restart_bits

    @property
    def without_restart(self) -> int:
        return self.sc_bits + self.flip_bits

    @property
    def overhead_pct(self) -> float:
        """Restart storage relative to the decoder without it."""
        return 100.0 * self.restart_bits / self.without_restart


def memory_estimate(omega: int, t_max: int, params: CostParams, N: int,
                    with_grm: bool = True) -> MemoryReport:
    n = _log2(N)
    if omega < 1 or t_max < 1:
        raise ValueError("omega and t_max must be >= 1")
    sc_bits = params.Q_ch * N + params.Q_int * (N - 1) + 2 * N - 1
    flip_bits = (params.Q_flip + omega * n) * (t_max - 1)
    return MemoryReport(sc_bits, flip_bits, N if with_grm else 0)
