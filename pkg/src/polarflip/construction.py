"""Polar code construction, CRC attach/check and the polar transform."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from polarflip._kernels import crc_remainder, polar_transform_inplace

__all__ = [
    "CrcSpec",
    "PolarCode",
    "CRC_POLYNOMIALS",
    "build_code",
    "nr_reliability",
    "nr_code",
    "crc_attach",
    "crc_check",
    "polar_encode",
    "is_power_of_two",
]

# Coefficients for z^r .. z^0.
CRC_POLYNOMIALS = {
    2: (1, 1, 1),
    3: (1, 0, 1, 1),
    6: (1, 1, 0, 0, 0, 0, 1),
    11: (1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
}


def is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


@dataclass(frozen=True)
class CrcSpec:
    """CRC generator polynomial, coefficients listed from z^r down to z^0."""

    polynomial: tuple[int, ...] = CRC_POLYNOMIALS[11]

    def __post_init__(self):
        poly = tuple(int(c) for c in self.polynomial)
        if len(poly) < 2 or any(c not in (0, 1) for c in poly):
            raise ValueError("CRC polynomial must be a 0/1 vector of length >= 2")
        if poly[0] != 1 or poly[-1] != 1:
            raise ValueError("CRC polynomial needs leading and constant coefficient 1")
        object.__setattr__(self, "polynomial", poly)

    @property
    def r(self) -> int:
        return len(self.polynomial) - 1

    @classmethod
    def of_degree(cls, r: int) -> "CrcSpec":
        try:
            return cls(CRC_POLYNOMIALS[r])
        except KeyError:
            raise ValueError(f"no built-in CRC polynomial of degree {r}") from None

    @property
    def _poly_array(self) -> np.ndarray:
        return np.asarray(self.polynomial, dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class PolarCode:
    """Immutable code geometry.

    ``info_set`` holds the k+r information positions (CRC included) in
    ascending order; ``crc`` is ``None`` for codes without a CRC.
    """

    N: int
    k: int
    info_set: np.ndarray
    crc: CrcSpec | None = None
    info_mask: np.ndarray = field(init=False, repr=False)
    frozen_set: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not is_power_of_two(self.N) or self.N < 4:
            raise ValueError(f"N must be a power of two >= 4, got {self.N}")
        info = np.asarray(self.info_set, dtype=np.int64)
        if info.ndim != 1 or len(info) != self.k_tot:
            raise ValueError(f"info set must hold k+r = {self.k_tot} indices")
        if len(info) and (np.any(np.diff(info) <= 0) or info[0] < 0 or info[-1] >= self.N):
            raise ValueError("info set must be strictly increasing within [0, N)")
        mask = np.zeros(self.N, dtype=np.bool_)
        mask[info] = True
        info.setflags(write=False)
        mask.setflags(write=False)
        frozen = np.flatnonzero(~mask)
        frozen.setflags(write=False)
        object.__setattr__(self, "info_set", info)
        object.__setattr__(self, "info_mask", mask)
        object.__setattr__(self, "frozen_set", frozen)

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def r(self) -> int:
        return 0 if self.crc is None else self.crc.r

    @property
    def k_tot(self) -> int:
        return self.k + self.r

    @property
    def rate(self) -> float:
        return self.k / self.N

    @property
    def a0(self) -> int:
        return int(self.info_set[0]) if self.k_tot else self.N

    @property
    def j_rhs(self) -> int:
        """Index into the info set of the first position in the right half."""
        return int(np.searchsorted(self.info_set, self.N // 2))

    def info_rank(self) -> np.ndarray:
        """Map leaf index -> j with A[j] = index, -1 on frozen positions."""
        rank = np.full(self.N, -1, dtype=np.int64)
        rank[self.info_set] = np.arange(self.k_tot)
        return rank

    def __repr__(self):
        return f"PolarCode(N={self.N}, k={self.k}, r={self.r})"


def build_code(N: int, k: int, r: int | CrcSpec | None, reliability) -> PolarCode:
    """Assign the k+r most reliable positions of ``reliability`` (least reliable first)."""
    if not is_power_of_two(N) or N < 4:
        raise ValueError(f"N must be a power of two >= 4, got {N}")
    if isinstance(r, CrcSpec):
        crc = r
    elif r is None or r == 0:
        crc = None
    else:
        crc = CrcSpec.of_degree(int(r))
    r_bits = 0 if crc is None else crc.r
    if k < 0 or k + r_bits > N:
        raise ValueError(f"k + r = {k + r_bits} does not fit in N = {N}")
    order = np.asarray(reliability, dtype=np.int64)
    if order.shape != (N,) or not np.array_equal(np.sort(order), np.arange(N)):
        raise ValueError("reliability must be a permutation of range(N)")
    k_tot = k + r_bits
    info = np.sort(order[N - k_tot:]) if k_tot else np.empty(0, dtype=np.int64)
    return PolarCode(N=N, k=k, info_set=info, crc=crc)


@lru_cache(maxsize=None)
def _nr_sequence_1024() -> tuple[int, ...]:
    text = resources.files("polarflip").joinpath("data/nr_reliability_1024.txt").read_text()
    return tuple(int(tok) for tok in text.split())


def nr_reliability(N: int) -> np.ndarray:
    """5G NR reliability order for length N <= 1024, least reliable first."""
    if not is_power_of_two(N) or N > 1024:
        raise ValueError("the 5G NR sequence covers powers of two up to 1024")
    seq = np.asarray(_nr_sequence_1024(), dtype=np.int64)
    return seq[seq < N]


def nr_code(N: int, k: int, r: int | None = 11) -> PolarCode:
    return build_code(N, k, r, nr_reliability(N))


def _as_bits(bits, name: str) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D bit vector")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError(f"{name} must contain only 0/1")
    return arr.astype(np.uint8)


def crc_attach(info, spec: CrcSpec, k: int | None = None) -> np.ndarray:
    """Return ``info`` followed by its r-bit remainder (MSB first, zero init)."""
    bits = _as_bits(info, "info")
    if k is not None and len(bits) != k:
        raise ValueError(f"expected {k} info bits, got {len(bits)}")
    rem = crc_remainder(bits, spec._poly_array)
    return np.concatenate([bits, rem])


def crc_check(payload, spec: CrcSpec, k_tot: int | None = None) -> bool:
    bits = _as_bits(payload, "payload")
    if k_tot is not None and len(bits) != k_tot:
        raise ValueError(f"expected {k_tot} payload bits, got {len(bits)}")
    if len(bits) < spec.r:
        raise ValueError("payload shorter than the CRC")
    rem = crc_remainder(bits[: len(bits) - spec.r], spec._poly_array)
    return bool(np.array_equal(rem, bits[len(bits) - spec.r:]))


def polar_encode(u) -> np.ndarray:
    """x = u G^{(x)n} over GF(2) with G = [[1, 0], [1, 1]]; self-inverse."""
    bits = _as_bits(u, "u")
    if not is_power_of_two(len(bits)):
        raise ValueError(f"length must be a power of two, got {len(bits)}")
    x = bits.copy()
    polar_transform_inplace(x)
    return x
