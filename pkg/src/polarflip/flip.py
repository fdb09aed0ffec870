"""SC-Flip / dynamic SC-Flip trial orchestration.

After a failed initial trial every information position is scored by the
flip metric and the best ``T_max - 1`` become single-flip candidates. Each
failed additional trial with fewer than ``omega`` flips proposes extensions
``eps + (j,)`` for information positions ``j`` past its last flip, scored on
that trial's decision LLRs. Trials stop at the first CRC pass.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from polarflip.construction import PolarCode
from polarflip.cost import CostParams, restart_saving, trial_cost
from polarflip.restart import MECHANISMS, plan_restart
from polarflip.sc import DecodeOutcome, LlrWorkspace, run_scheduled_trial
from polarflip.schedule import build_schedule, leaf_schedule

__all__ = [
    "J_THRESHOLD",
    "J_PENALTY",
    "FlipCandidate",
    "CandidatePool",
    "FlipConfig",
    "TrialRecord",
    "FlipDecodeResult",
    "FlipDecoder",
    "flip_metric",
    "seed_pool",
    "extend_pool",
    "decode_frame",
]

J_THRESHOLD = 5.0
J_PENALTY = 1.5


@dataclass(frozen=True)
class FlipCandidate:
    eps: tuple[int, ...]
    metric: float
    tried: bool = False
    # Pool order: metric, then first flip index, then the whole set.
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (self.metric, self.eps[0], self.eps))


def _by_key(cand: FlipCandidate):
    return cand.key


class CandidatePool:
    """Untried candidates, ascending by ``FlipCandidate.key``, at most ``capacity``."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = int(capacity)
        self._keys: list = []
        self._entries: list[FlipCandidate] = []
        self._seen: set[tuple[int, ...]] = set()

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def entries(self) -> list[FlipCandidate]:
        return list(self._entries)

    @property
    def full(self) -> bool:
        return len(self._entries) >= self.capacity

    @property
    def head(self) -> FlipCandidate | None:
        return self._entries[0] if self._entries else None

    def worst_key(self):
        return self._keys[-1] if self._keys else None

    def offer(self, cand: FlipCandidate) -> bool:
        """Insert unless the pool is full and ``cand`` does not beat the worst entry."""
        if self.capacity == 0 or cand.eps in self._seen:
            return False
        key = cand.key
        if self.full:
            if key >= self._keys[-1]:
                return False
            self._keys.pop()
            self._seen.discard(self._entries.pop().eps)
        pos = bisect.bisect_right(self._keys, key)
        self._keys.insert(pos, key)
        self._entries.insert(pos, cand)
        self._seen.add(cand.eps)
        return True

    def merge(self, cands) -> int:
        """Bulk ``offer``: one sort instead of many inserts.

        Matches repeated ``offer`` for distinct flip sets; a repeated set
        keeps its first occurrence.
        """
        fresh, batch = [], set()
        for c in cands:
            if c.eps not in self._seen and c.eps not in batch:
                batch.add(c.eps)
                fresh.append(c)
        if not fresh or self.capacity == 0:
            return 0
        if len(fresh) <= 8:
            return sum(self.offer(c) for c in fresh)
        merged = sorted(self._entries + fresh, key=_by_key)[: self.capacity]
        self._entries = merged
        self._keys = [c.key for c in merged]
        kept = {c.eps for c in merged}
        added = len(kept - self._seen)
        self._seen = kept
        return added

    def pop(self) -> FlipCandidate:
        if not self._entries:
            raise IndexError("pop from an empty candidate pool")
        self._keys.pop(0)
        cand = self._entries.pop(0)
        self._seen.discard(cand.eps)
        return FlipCandidate(cand.eps, cand.metric, tried=True)


@dataclass(frozen=True)
class FlipConfig:
    omega: int = 1
    t_max: int = 1

    def __post_init__(self):
        if self.omega < 1:
            raise ValueError("omega must be >= 1")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")


def _metric_terms(alpha_dec: np.ndarray, code: PolarCode):
    a = np.abs(np.asarray(alpha_dec, dtype=np.float64)[code.info_set])
    penalty = np.cumsum(a <= J_THRESHOLD) * J_PENALTY
    return a, penalty


def flip_metric(eps, alpha_dec, code: PolarCode) -> float:
    """Sum of |alpha_dec| over the flipped bits plus J for every info bit up to the last flip."""
    idx = [int(e) for e in eps]
    if not idx:
        raise ValueError("empty flip set")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("flip set must be strictly increasing")
    if idx[0] < 0 or idx[-1] >= code.N or not code.info_mask[idx].all():
        raise ValueError("flip set must contain information positions only")
    alpha_dec = np.asarray(alpha_dec, dtype=np.float64)
    a, penalty = _metric_terms(alpha_dec, code)
    last = int(np.searchsorted(code.info_set, idx[-1]))
    return float(np.abs(alpha_dec[idx]).sum() + penalty[last])


def seed_pool(outcome: DecodeOutcome, cfg: FlipConfig, code: PolarCode) -> CandidatePool:
    if outcome.crc_pass:
        raise ValueError("the initial trial passed; no candidates are needed")
    pool = CandidatePool(cfg.t_max - 1)
    if pool.capacity == 0 or code.k_tot == 0:
        return pool
    a, penalty = _metric_terms(outcome.alpha_dec, code)
    metrics = a + penalty
    order = np.lexsort((np.arange(code.k_tot), metrics))[: pool.capacity]
    pool.merge(FlipCandidate((int(code.info_set[j]),), float(metrics[j])) for j in order)
    return pool


def extend_pool(pool: CandidatePool, used: FlipCandidate, outcome: DecodeOutcome,
                cfg: FlipConfig, code: PolarCode) -> int:
    """Offer ``used.eps + (j,)`` for every info position j past its last flip.

    Returns the number of candidates that entered the pool.
    """
    if cfg.omega == 1:
        return 0
    if len(used.eps) >= cfg.omega:
        raise ValueError("flip set already has the maximum size")
    a, penalty = _metric_terms(outcome.alpha_dec, code)
    base = float(np.abs(np.asarray(outcome.alpha_dec)[list(used.eps)]).sum())
    first = int(np.searchsorted(code.info_set, used.eps[-1])) + 1
    if first >= code.k_tot:
        return 0
    metrics = base + a[first:] + penalty[first:]
    ranks = np.arange(first, code.k_tot)
    # Only candidates within the best `capacity` of pool + new can survive.
    if len(pool) + len(metrics) > pool.capacity:
        current = np.fromiter((c.metric for c in pool), dtype=np.float64, count=len(pool))
        both = np.concatenate([current, metrics])
        threshold = np.partition(both, pool.capacity - 1)[pool.capacity - 1]
        keep = metrics <= threshold
        metrics, ranks = metrics[keep], ranks[keep]
    order = np.lexsort((ranks, metrics))[: pool.capacity]
    info = code.info_set
    return pool.merge(FlipCandidate(used.eps + (int(info[ranks[j]]),), float(metrics[j]))
                      for j in order)


@dataclass(frozen=True)
class TrialRecord:
    psi: int
    eps: tuple[int, ...]
    cycles: int
    saving: int


@dataclass
class FlipDecodeResult:
    u: np.ndarray
    success: bool
    trials: list[TrialRecord] = field(default_factory=list)
    full_cycles: int = 0
    first_candidate: int | None = None

    @property
    def tau(self) -> int:
        return len(self.trials)

    @property
    def tau_extra(self) -> int:
        return self.tau - 1

    @property
    def cycles_without_mechanism(self) -> int:
        return self.tau * self.full_cycles

    @property
    def cycles_with_mechanism(self) -> int:
        return self.cycles_without_mechanism - sum(t.saving for t in self.trials)


class FlipDecoder:
    """Reusable decoder for one code / configuration; holds caches and a workspace."""

    def __init__(self, code: PolarCode, cfg: FlipConfig, baseline: str = "sc",
                 mechanism: str = "none", params: CostParams | None = None, schedule=None):
        if baseline not in ("sc", "sclrt", "fssc"):
            raise ValueError(f"unknown baseline {baseline!r}")
        if mechanism not in MECHANISMS:
            raise ValueError(f"unknown mechanism {mechanism!r}")
        self.code = code
        self.cfg = cfg
        self.baseline = baseline
        self.mechanism = mechanism
        self.params = params or CostParams()
        if baseline == "fssc":
            self.schedule = schedule or build_schedule(code, min(cfg.omega, 3))
        else:
            self.schedule = leaf_schedule(code.N)
        self.full_cycles = trial_cost(baseline, code, self.params,
                                      self.schedule if baseline == "fssc" else None)
        self._saving_cache: dict[int, int] = {}
        self._ws = LlrWorkspace(code.N)
        self._zeros = np.zeros(code.N, dtype=np.uint8)

    def saving(self, psi: int) -> int:
        if self.mechanism == "none":
            return 0
        if psi not in self._saving_cache:
            sched = self.schedule if self.baseline == "fssc" else None
            self._saving_cache[psi] = restart_saving(self.baseline, psi, self.code, self.params,
                                                     sched, mechanism=self.mechanism)
        return self._saving_cache[psi]

    def _plan(self, eps):
        sched = self.schedule if self.baseline == "fssc" else None
        return plan_restart(self.code, eps, self.mechanism, self.baseline, sched)

    def _record(self, psi: int, eps) -> TrialRecord:
        s = self.saving(psi)
        return TrialRecord(psi, tuple(eps), self.full_cycles - s, s)

    def decode(self, alpha_ch) -> FlipDecodeResult:
        code, cfg = self.code, self.cfg
        spec = self._plan(())
        out0 = run_scheduled_trial(code, self.schedule, alpha_ch, (), spec.psi,
                                   self._zeros, None, self._ws)
        res = FlipDecodeResult(out0.u, out0.crc_pass, [self._record(spec.psi, ())],
                               self.full_cycles)
        if out0.crc_pass or cfg.t_max == 1:
            return res
        pool = seed_pool(out0, cfg, code)
        if pool.head is not None:
            res.first_candidate = pool.head.eps[0]
        while len(res.trials) < cfg.t_max and len(pool):
            cand = pool.pop()
            spec = self._plan(cand.eps)
            out = run_scheduled_trial(code, self.schedule, alpha_ch, cand.eps, spec.psi,
                                      out0.u, out0.alpha_dec, self._ws)
            res.trials.append(self._record(spec.psi, cand.eps))
            res.u = out.u
            if out.crc_pass:
                res.success = True
                return res
            if len(cand.eps) < cfg.omega and len(res.trials) < cfg.t_max:
                extend_pool(pool, cand, out, cfg, code)
        return res


def decode_frame(code: PolarCode, alpha_ch, cfg: FlipConfig, baseline: str = "sc",
                 mechanism: str = "none", *, params: CostParams | None = None,
                 schedule=None) -> FlipDecodeResult:
    return FlipDecoder(code, cfg, baseline, mechanism, params, schedule).decode(alpha_ch)
