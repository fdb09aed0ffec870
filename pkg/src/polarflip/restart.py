"""Restart planning for flip trials and partial-sum restoration by re-encoding.

A trial restarted at leaf psi reuses the initial trial's estimates left of
psi. The LLRs of psi are recomputed along the root-to-leaf path: stages where
bit s of psi is 0 apply f, stages where it is 1 apply g, which needs the
partial sums of the left sibling. Those are recovered by polar-encoding the
2^s stored estimates starting at ``psi - phi_s`` with ``phi_s = psi mod 2^(s+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polarflip import _kernels as K
from polarflip.construction import PolarCode
from polarflip.sc import LlrWorkspace
from polarflip.schedule import NodeSchedule

__all__ = [
    "MECHANISMS",
    "RestartSpec",
    "plan_restart",
    "restore_partial_sums",
    "execute_restart_path",
]

MECHANISMS = ("none", "lrt", "srm", "grm")


@dataclass(frozen=True)
class RestartSpec:
    """Where a trial resumes. ``psi == N`` means nothing is left to decode."""

    psi: int
    n: int
    i1: int | None = None
    mechanism: str = "grm"
    baseline: str = "sc"

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def degenerate(self) -> bool:
        return self.psi >= self.N

    @property
    def H(self) -> tuple[int, ...]:
        """Binary expansion of psi over n bits, most significant first."""
        if self.degenerate:
            return ()
        return tuple((self.psi >> (self.n - 1 - b)) & 1 for b in range(self.n))

    def phi(self, stage: int) -> int:
        return self.psi % (1 << (stage + 1))

    @property
    def phis(self) -> dict[int, int]:
        """Offsets for every stage whose partial sums need restoring."""
        return {s: self.phi(s) for s in self.g_stages}

    @property
    def g_stages(self) -> tuple[int, ...]:
        if self.degenerate:
            return ()
        return tuple(s for s in range(self.n - 1, -1, -1) if (self.psi >> s) & 1)

    @property
    def f_stages(self) -> tuple[int, ...]:
        if self.degenerate:
            return ()
        return tuple(s for s in range(self.n - 1, -1, -1) if not (self.psi >> s) & 1)


def _next_info(code: PolarCode, index: int) -> int:
    j = int(np.searchsorted(code.info_set, index, side="right"))
    return int(code.info_set[j]) if j < code.k_tot else code.N


def plan_restart(code: PolarCode, flips, mechanism: str = "grm", baseline: str = "sc",
                 schedule: NodeSchedule | None = None) -> RestartSpec:
    """Choose the restart location of a trial flipping ``flips``.

    ``mechanism="none"`` restarts at 0 (or at a0 for the sclrt baseline).
    Under the fssc baseline psi is moved back to the start of the node
    containing it, and a flip inside a special node restarts at that node.
    """
    if mechanism not in MECHANISMS:
        raise ValueError(f"unknown mechanism {mechanism!r}")
    if baseline == "fssc" and schedule is None:
        raise ValueError("the fssc baseline needs a node schedule")
    eps = sorted(int(f) for f in flips)
    i1 = eps[0] if eps else None
    N = code.N
    if mechanism == "grm" and i1 is not None:
        if baseline == "fssc" and schedule.is_special(i1):
            psi = schedule.anchor(i1)
        else:
            psi = _next_info(code, i1)
    elif mechanism == "srm" and i1 is not None:
        psi = N // 2 if i1 >= N // 2 else 0
    elif mechanism == "lrt" or baseline == "sclrt":
        psi = code.a0
    else:
        psi = 0
    if baseline == "sclrt" and psi < code.a0:
        psi = code.a0
    if baseline == "fssc":
        psi = schedule.anchor(psi)
    return RestartSpec(psi=int(psi), n=code.n, i1=i1, mechanism=mechanism, baseline=baseline)


def restore_partial_sums(u_current, psi: int, stage: int) -> np.ndarray:
    """Partial sums consumed by the stage-``stage`` g-function on psi's path."""
    u = np.asarray(u_current, dtype=np.uint8)
    N = u.shape[0]
    if not 0 <= psi < N or not 0 <= stage < N.bit_length() - 1:
        raise ValueError("psi or stage out of range")
    if not (psi >> stage) & 1:
        raise ValueError(f"stage {stage} of psi={psi} applies f; nothing to restore")
    out = np.empty(1 << stage, dtype=np.uint8)
    K.restore_stage_ps(u, psi, stage, out)
    return out


def execute_restart_path(alpha_ch, spec: RestartSpec, u_current,
                         workspace: LlrWorkspace | None = None) -> float:
    """Run the restart path down to leaf psi and return its decision LLR.

    The workspace is left ready to continue decoding at psi.
    """
    if spec.degenerate:
        raise ValueError("a degenerate restart has no path")
    ws = workspace if workspace is not None else LlrWorkspace(spec.N)
    ws.load(alpha_ch)
    ws.u[: spec.psi] = np.asarray(u_current, dtype=np.uint8)[: spec.psi]
    K.restart_path(ws.alpha, ws.ps, ws.u, spec.psi, 0, spec.n)
    return float(ws.alpha[0])
