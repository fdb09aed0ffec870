"""Successive-cancellation decoding with bit flipping and mid-tree restart."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polarflip import _kernels as K
from polarflip.construction import PolarCode
from polarflip.schedule import NodeSchedule, leaf_schedule

__all__ = [
    "f_min_sum",
    "g_func",
    "LlrWorkspace",
    "DecodeOutcome",
    "sc_trial",
    "run_scheduled_trial",
]


def f_min_sum(a1: float, a2: float) -> float:
    """Min-sum check-node update; a zero sign counts as positive."""
    return float(K.f_min_sum(float(a1), float(a2)))


def g_func(a1: float, a2: float, beta: int) -> float:
    if beta not in (0, 1):
        raise ValueError("beta must be 0 or 1")
    return float(K.g_func(float(a1), float(a2), int(beta)))


class LlrWorkspace:
    """Per-job decoder memory; see ``polarflip._kernels`` for the layout."""

    def __init__(self, N: int):
        self.N = int(N)
        self.n = self.N.bit_length() - 1
        self.alpha = np.zeros(2 * self.N - 1, dtype=np.float64)
        self.ps = np.zeros(self.N - 1, dtype=np.uint8)
        self.u = np.zeros(self.N, dtype=np.uint8)
        self.alpha_dec = np.zeros(self.N, dtype=np.float64)
        self.flips = np.zeros(self.N, dtype=np.uint8)
        self.scratch = np.zeros(self.N, dtype=np.uint8)

    @property
    def alpha_ch(self) -> np.ndarray:
        return self.alpha[self.N - 1:]

    @property
    def alpha_int(self) -> np.ndarray:
        return self.alpha[: self.N - 1]

    @property
    def beta_int(self) -> np.ndarray:
        return self.ps

    def stage_alpha(self, stage: int) -> np.ndarray:
        return self.alpha[(1 << stage) - 1: (2 << stage) - 1]

    def stage_ps(self, stage: int) -> np.ndarray:
        return self.ps[(1 << stage) - 1: (2 << stage) - 1]

    def load(self, alpha_ch) -> None:
        llr = np.asarray(alpha_ch, dtype=np.float64)
        if llr.shape != (self.N,):
            raise ValueError(f"expected {self.N} channel LLRs, got shape {llr.shape}")
        if not np.all(np.isfinite(llr)):
            raise ValueError("channel LLRs must be finite")
        self.alpha_ch[:] = llr


@dataclass
class DecodeOutcome:
    """Result of one trial.

    ``alpha_dec`` is meaningful at information positions only. ``restored_stages``
    counts the g-stages whose partial sums were rebuilt by re-encoding.
    """

    u: np.ndarray
    alpha_dec: np.ndarray
    crc_pass: bool
    model_cycles: int | None = None
    restored_stages: int = 0

    def info_bits(self, code: PolarCode) -> np.ndarray:
        return self.u[code.info_set][: code.k]


def _check_flips(code: PolarCode, flips) -> np.ndarray:
    eps = np.unique(np.asarray(list(flips), dtype=np.int64))
    if eps.size:
        if eps[0] < 0 or eps[-1] >= code.N:
            raise ValueError("flip index out of range")
        if not code.info_mask[eps].all():
            raise ValueError("flip index targets a frozen position")
    return eps


def run_scheduled_trial(code: PolarCode, schedule: NodeSchedule, alpha_ch, flips=(),
                        psi: int = 0, u_rest=None, alpha_dec_rest=None,
                        workspace: LlrWorkspace | None = None) -> DecodeOutcome:
    """Decode ``alpha_ch`` along ``schedule``, resuming at leaf ``psi``.

    For ``psi > 0`` the estimates ``u[:psi]`` come from ``u_rest`` with every
    flip below psi applied, and the decision LLRs below psi from
    ``alpha_dec_rest``. ``psi`` must start a schedule node; ``psi == N``
    decodes nothing and only re-checks the CRC.
    """
    N = code.N
    if schedule.N != N:
        raise ValueError("schedule and code lengths differ")
    ws = workspace if workspace is not None else LlrWorkspace(N)
    if ws.N != N:
        raise ValueError("workspace and code lengths differ")
    eps = _check_flips(code, flips)
    psi = int(psi)
    if not 0 <= psi <= N:
        raise ValueError(f"restart index {psi} outside [0, {N}]")
    ws.load(alpha_ch)
    ws.flips[:] = 0
    ws.flips[eps] = 1
    ws.alpha_dec[:] = 0.0
    if psi == 0:
        first = 0
    else:
        if u_rest is None:
            raise ValueError("a restart needs the initial-trial estimates")
        if psi < N and schedule.anchor(psi) != psi:
            raise ValueError(f"restart index {psi} is not the start of a schedule node")
        for f in eps[eps < psi]:
            if code.info_mask[f + 1: psi].any():
                raise ValueError(f"flip at {f} would change information bits left of {psi}")
        ws.u[:psi] = np.asarray(u_rest, dtype=np.uint8)[:psi]
        ws.u[eps[eps < psi]] ^= 1
        if alpha_dec_rest is not None:
            ws.alpha_dec[:psi] = np.asarray(alpha_dec_rest)[:psi]
        first = schedule.index_at(psi) if psi < N else len(schedule)
    restored = K.run_trial(ws.alpha, ws.ps, ws.u, ws.alpha_dec, ws.scratch, code.info_mask,
                           schedule.kinds, schedule.starts, schedule.stages, ws.flips,
                           first, code.n)
    if code.crc is None:
        ok = True
    else:
        ok = bool(K.crc_ok(ws.u, code.info_set, code.crc._poly_array))
    return DecodeOutcome(ws.u.copy(), ws.alpha_dec.copy(), ok, None, int(restored))


def sc_trial(code: PolarCode, alpha_ch, flips=(), restart=None, u_rest=None,
             alpha_dec_rest=None, workspace: LlrWorkspace | None = None) -> DecodeOutcome:
    """One SC trial; ``restart`` is a ``RestartSpec`` (or anything with ``psi``)."""
    psi = 0 if restart is None else int(restart.psi)
    return run_scheduled_trial(code, leaf_schedule(code.N), alpha_ch, flips, psi,
                               u_rest, alpha_dec_rest, workspace)
