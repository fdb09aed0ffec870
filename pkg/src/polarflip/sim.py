"""Monte-Carlo FER / execution-time sweeps and flip-candidate statistics.

Frames are processed in fixed-size chunks in index order; the stopping rule
is evaluated after each chunk, so results do not depend on the worker count.
Cycle counts come from the analytic cost model, never from wall-clock time.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from polarflip.channel import ChannelConfig, frame_rng, transmit
from polarflip.construction import crc_attach, nr_code, polar_encode
from polarflip.cost import CostParams
from polarflip.flip import FlipConfig, FlipDecoder

__all__ = [
    "SimConfig",
    "SweepPoint",
    "PmfReport",
    "PointResult",
    "simulate_point",
    "summarize_rows",
    "pmf_from_result",
    "run_sweep",
    "run_pmf",
    "emit_report",
    "write_sweep_csv",
    "write_pmf_csv",
    "write_manifest",
    "load_manifest",
]

SWEEP_COLUMNS = ("ebn0_db", "frames", "errors", "fer", "avg_cc", "avg_cc_mech", "reduction_pct")


@dataclass(frozen=True)
class SimConfig:
    N: int = 1024
    k: int = 512
    crc: int = 11
    omega: int = 3
    t_max: int = 301
    baseline: str = "sc"
    mechanism: str = "grm"
    points: tuple[float, ...] = (1.75,)
    axis: str = "ebn0"
    min_frames: int = 20_000
    target_errors: int = 200
    chunk: int = 500
    seed: int = 0
    workers: int = 1
    P: int = 64
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        if self.min_frames < 1 or self.target_errors < 1:
            raise ValueError("min_frames and target_errors must be >= 1")
        if self.chunk < 1 or self.workers < 1:
            raise ValueError("chunk and workers must be >= 1")
        FlipConfig(self.omega, self.t_max)

    @property
    def rate(self) -> float:
        return self.k / self.N

    def code(self):
        return nr_code(self.N, self.k, self.crc or None)

    def decoder(self) -> FlipDecoder:
        return FlipDecoder(self.code(), FlipConfig(self.omega, self.t_max), self.baseline,
                           self.mechanism, CostParams(P=self.P))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["points"] = list(self.points)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class SweepPoint:
    ebn0_db: float
    frames: int
    errors: int
    avg_cc: float
    avg_cc_mech: float

    @property
    def fer(self) -> float:
        return self.errors / self.frames if self.frames else 0.0

    @property
    def reduction_pct(self) -> float:
        if self.avg_cc == 0:
            return 0.0
        return 100.0 * (self.avg_cc - self.avg_cc_mech) / self.avg_cc

    def row(self) -> dict:
        return {"ebn0_db": self.ebn0_db, "frames": self.frames, "errors": self.errors,
                "fer": self.fer, "avg_cc": self.avg_cc, "avg_cc_mech": self.avg_cc_mech,
                "reduction_pct": self.reduction_pct}


@dataclass
class PmfReport:
    """Distribution of the first flip index over the additional trials."""

    info_set: np.ndarray
    counts: np.ndarray
    j_rhs: int
    frames: int = 0
    failed_frames: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def sufficient(self) -> bool:
        return int(self.counts.sum()) > 0

    @property
    def pmf(self) -> np.ndarray:
        total = self.counts.sum()
        if total == 0:
            return np.zeros(len(self.counts))
        return self.counts / total

    @property
    def p_lhs(self) -> float:
        return float(self.pmf[: self.j_rhs].sum())

    @property
    def p_rhs(self) -> float:
        return float(self.pmf[self.j_rhs:].sum()) if self.sufficient else 0.0


def _frame_chunk(cfg: SimConfig, point_idx: int, start: int, stop: int):
    """Decode frames [start, stop).

    Returns one row per frame (error, tau, cycles without mechanism, cycles
    with mechanism, first candidate of the first additional trial) and a
    length-N histogram of the first flip index over all additional trials.
    """
    dec = _decoder_for(cfg)
    code = dec.code
    channel = ChannelConfig(cfg.points[point_idx], cfg.rate, cfg.seed, cfg.axis)
    rows = np.empty((stop - start, 5), dtype=np.int64)
    hist = np.zeros(code.N, dtype=np.int64)
    u = np.zeros(code.N, dtype=np.uint8)
    for row, f in enumerate(range(start, stop)):
        rng = frame_rng(cfg.seed, point_idx, f)
        info = rng.integers(0, 2, code.k, dtype=np.uint8)
        payload = crc_attach(info, code.crc) if code.crc is not None else info
        u[:] = 0
        u[code.info_set] = payload
        llr = transmit(polar_encode(u), channel, rng)
        res = dec.decode(llr)
        wrong = not np.array_equal(res.u[code.info_set][: code.k], info)
        first = -1 if res.first_candidate is None else res.first_candidate
        rows[row] = (wrong, res.tau, res.cycles_without_mechanism,
                     res.cycles_with_mechanism, first)
        for t in res.trials[1:]:
            hist[t.eps[0]] += 1
    return rows, hist


_DECODERS: dict = {}


def _decoder_for(cfg: SimConfig) -> FlipDecoder:
    key = (cfg.N, cfg.k, cfg.crc, cfg.omega, cfg.t_max, cfg.baseline, cfg.mechanism, cfg.P)
    if key not in _DECODERS:
        _DECODERS[key] = cfg.decoder()
    return _DECODERS[key]


def _chunk_task(args):
    return _frame_chunk(*args)


@dataclass
class PointResult:
    rows: np.ndarray
    trial_hist: np.ndarray


def simulate_point(cfg: SimConfig, point_idx: int, progress=None) -> PointResult:
    """Per-frame rows for one channel point, honouring the stopping rule."""
    limit = cfg.min_frames
    done, errors, chunks = 0, 0, []
    hist = np.zeros(cfg.N, dtype=np.int64)

    def finished():
        return done >= limit or errors >= cfg.target_errors

    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        while not finished():
            batch = []
            start = done
            for _ in range(cfg.workers):
                stop = min(start + cfg.chunk, limit)
                if stop <= start:
                    break
                batch.append((cfg, point_idx, start, stop))
                start = stop
            results = pool.map(_chunk_task, batch) if pool else map(_chunk_task, batch)
            for rows, chunk_hist in results:
                if finished():
                    break
                chunks.append(rows)
                hist += chunk_hist
                done += len(rows)
                errors += int(rows[:, 0].sum())
                if progress:
                    progress(point_idx, done, errors)
    finally:
        if pool:
            pool.shutdown()
    rows = np.concatenate(chunks) if chunks else np.empty((0, 5), dtype=np.int64)
    return PointResult(rows, hist)


def summarize_rows(point: float, rows: np.ndarray) -> SweepPoint:
    """FER and average cycles over the per-frame rows of ``simulate_point``."""
    frames = len(rows)
    if frames == 0:
        return SweepPoint(point, 0, 0, 0.0, 0.0)
    return SweepPoint(point, frames, int(rows[:, 0].sum()), float(rows[:, 2].mean()),
                      float(rows[:, 3].mean()))


def run_sweep(cfg: SimConfig, progress=None) -> list[SweepPoint]:
    return [summarize_rows(p, simulate_point(cfg, i, progress).rows)
            for i, p in enumerate(cfg.points)]


def pmf_from_result(cfg: SimConfig, result: PointResult) -> PmfReport:
    """PMF of the first flip index over all additional trials.

    The distribution restricted to each frame's first additional trial is
    kept in ``extra["first_trial_counts"]``.
    """
    code = cfg.code()
    rows = result.rows
    counts = result.trial_hist[code.info_set].copy()
    first_counts = np.zeros(code.k_tot, dtype=np.int64)
    firsts = rows[:, 4]
    np.add.at(first_counts, code.info_rank()[firsts[firsts >= 0]], 1)
    failed = int(np.count_nonzero(rows[:, 1] > 1)) if len(rows) else 0
    return PmfReport(code.info_set, counts, code.j_rhs, len(rows), failed,
                     {"first_trial_counts": first_counts})


def run_pmf(cfg: SimConfig, point_idx: int = 0, progress=None) -> PmfReport:
    return pmf_from_result(cfg, simulate_point(cfg, point_idx, progress))


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_sweep_csv(points, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for p in points:
            row = p.row()
            writer.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v)
                             for k, v in row.items()})
    return path


def write_pmf_csv(report: PmfReport, path) -> Path:
    path = Path(path)
    pmf = report.pmf
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("j", "a_j", "probability"))
        for j, (a, p) in enumerate(zip(report.info_set, pmf)):
            writer.writerow((j, int(a), f"{p:.10g}"))
    return path


def write_manifest(cfg: SimConfig, path, **extra) -> Path:
    path = Path(path)
    data = {"config": cfg.to_dict(), **extra}
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def load_manifest(path) -> SimConfig:
    data = json.loads(Path(path).read_text())
    return SimConfig.from_dict(data["config"])


def emit_report(cfg: SimConfig, result, out=None) -> list[Path]:
    """Write a sweep (list of SweepPoint) or PMF report plus the run manifest."""
    target = out if out is not None else cfg.out
    if target is None:
        raise ValueError("no output directory given")
    out_dir = _out_dir(target)
    if isinstance(result, PmfReport):
        files = [write_pmf_csv(result, out_dir / "pmf.csv")]
        summary = {"kind": "pmf", "frames": result.frames, "failed_frames": result.failed_frames,
                   "j_rhs": result.j_rhs, "p_lhs": result.p_lhs, "p_rhs": result.p_rhs,
                   "sufficient_data": result.sufficient}
    else:
        files = [write_sweep_csv(result, out_dir / "sweep.csv")]
        summary = {"kind": "sweep"}
    files.append(write_manifest(cfg, out_dir / "manifest.json", summary=summary))
    return files
