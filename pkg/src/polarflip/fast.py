"""Fast-SSC decoding: R0 / R1 / REP / SPC nodes decoded in one step.

Node decisions are taken in the codeword domain of the node: R1 and SPC
hard-decide the node LLRs (SPC then repairs even parity on the least reliable
bit) and the leaf estimates are their polar re-encoding. A flip on leaf
position ``start + j`` of an R1/SPC node inverts the j-th node decision, and
the node LLR at that position serves as its decision LLR.
"""

from __future__ import annotations

import numpy as np

from polarflip import _kernels as K
from polarflip.construction import PolarCode
from polarflip.sc import DecodeOutcome, LlrWorkspace, run_scheduled_trial
from polarflip.schedule import KIND_CODES, NodeSchedule, build_schedule

__all__ = ["build_schedule", "decode_special_node", "fssc_trial"]


def decode_special_node(kind: str, alpha_v, flips=()):
    """Decode one node from its LLRs.

    Returns ``(u, beta, alpha_dec)``: leaf estimates, the node's partial sums
    and the per-leaf decision LLRs (NaN where no decision is taken).
    """
    if kind not in KIND_CODES or kind == "LEAF":
        raise ValueError(f"unknown node kind {kind!r}")
    a = np.asarray(alpha_v, dtype=np.float64)
    size = a.shape[0]
    if a.ndim != 1 or size < 2 or size & (size - 1):
        raise ValueError("node LLRs must have power-of-two length >= 2")
    local = np.zeros(size, dtype=np.uint8)
    for j in flips:
        j = int(j)
        if not 0 <= j < size:
            raise ValueError(f"flip {j} outside the node")
        frozen = (kind == "R0" or (kind == "REP" and j != size - 1)
                  or (kind == "SPC" and j == 0))
        if frozen:
            raise ValueError(f"flip {j} targets a frozen position of a {kind} node")
        local[j] = 1
    sv = size.bit_length() - 1
    alpha = np.zeros(2 * size - 1)
    alpha[size - 1:] = a
    u = np.zeros(size, dtype=np.uint8)
    dec = np.full(size, np.nan)
    beta = np.zeros(size, dtype=np.uint8)
    info = np.ones(size, dtype=np.bool_)
    K.decode_node(KIND_CODES[kind], alpha, sv, 0, info, local, u, dec, beta)
    return u, beta, dec


def fssc_trial(code: PolarCode, schedule: NodeSchedule, alpha_ch, flips=(), restart=None,
               u_rest=None, alpha_dec_rest=None,
               workspace: LlrWorkspace | None = None) -> DecodeOutcome:
    """One Fast-SSC trial; with ``restart`` every node left of its psi is skipped."""
    psi = 0 if restart is None else int(restart.psi)
    return run_scheduled_trial(code, schedule, alpha_ch, flips, psi, u_rest,
                               alpha_dec_rest, workspace)
