"""BPSK over AWGN with reproducible per-frame noise streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ChannelConfig", "noise_sigma", "transmit", "frame_rng"]

AXES = ("ebn0", "snr")


def noise_sigma(point_db: float, rate: float, axis: str = "ebn0") -> float:
    """Noise standard deviation for unit-energy BPSK.

    ``axis="ebn0"`` reads ``point_db`` as Eb/N0 (energy per information bit),
    ``axis="snr"`` as Es/N0 (energy per channel symbol).
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    scale = rate if axis == "ebn0" else 1.0
    return math.sqrt(1.0 / (2.0 * scale * 10.0 ** (point_db / 10.0)))


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float
    seed: int = 0
    axis: str = "ebn0"
    noiseless: bool = False

    def __post_init__(self):
        noise_sigma(self.ebn0_db, self.rate, self.axis)

    @property
    def sigma(self) -> float:
        return noise_sigma(self.ebn0_db, self.rate, self.axis)


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    """Independent stream per (seed, sweep point, frame index)."""
    return np.random.default_rng([int(seed), int(point), int(frame)])


def transmit(x, cfg: ChannelConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Channel LLRs 2y/sigma^2 for codeword ``x``; positive means bit 0."""
    bits = np.asarray(x)
    if bits.ndim != 1:
        raise ValueError("codeword must be 1-D")
    sigma = cfg.sigma
    y = 1.0 - 2.0 * bits.astype(np.float64)
    if not cfg.noiseless:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        y = y + sigma * rng.standard_normal(bits.shape[0])
    return 2.0 * y / sigma**2
