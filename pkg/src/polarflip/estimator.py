"""scikit-learn style wrapper: rows of channel LLRs in, information bits out."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from polarflip.construction import crc_attach, nr_code, polar_encode
from polarflip.cost import CostParams
from polarflip.flip import FlipConfig, FlipDecoder

__all__ = ["PolarFlipDecoder"]


class PolarFlipDecoder(BaseEstimator):
    """CRC-aided flip decoder for a 5G-constructed polar code.

    Parameters mirror the CLI. ``fit`` only builds the code and decoder; there
    is nothing to learn. After ``predict`` the per-frame trial counts and
    model cycle counts are available as ``tau_``, ``cycles_`` and
    ``cycles_mech_``.
    """

    def __init__(self, N=1024, k=512, crc=11, omega=3, t_max=301, baseline="sc",
                 mechanism="grm", P=64):
        self.N = N
        self.k = k
        self.crc = crc
        self.omega = omega
        self.t_max = t_max
        self.baseline = baseline
        self.mechanism = mechanism
        self.P = P

    def fit(self, X=None, y=None):
        self.code_ = nr_code(self.N, self.k, self.crc or None)
        self.decoder_ = FlipDecoder(self.code_, FlipConfig(self.omega, self.t_max),
                                    self.baseline, self.mechanism, CostParams(P=self.P))
        self.n_features_in_ = self.N
        if X is not None:
            self._check_llrs(X)
        return self

    def _check_llrs(self, X) -> np.ndarray:
        X = check_array(X, dtype=np.float64, ensure_2d=True)
        if X.shape[1] != self.N:
            raise ValueError(f"X has {X.shape[1]} columns, expected N = {self.N}")
        return X

    def encode(self, info) -> np.ndarray:
        """Codewords (one row per message) for rows of k information bits."""
        check_is_fitted(self, "code_")
        info = check_array(info, dtype=np.uint8, ensure_2d=True)
        if info.shape[1] != self.k:
            raise ValueError(f"expected {self.k} information bits per row")
        code = self.code_
        out = np.zeros((info.shape[0], code.N), dtype=np.uint8)
        for row, msg in enumerate(info):
            u = np.zeros(code.N, dtype=np.uint8)
            u[code.info_set] = crc_attach(msg, code.crc) if code.crc is not None else msg
            out[row] = polar_encode(u)
        return out

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "decoder_")
        X = self._check_llrs(X)
        code = self.code_
        bits = np.zeros((X.shape[0], code.k), dtype=np.uint8)
        self.tau_ = np.zeros(X.shape[0], dtype=np.int64)
        self.cycles_ = np.zeros(X.shape[0], dtype=np.int64)
        self.cycles_mech_ = np.zeros(X.shape[0], dtype=np.int64)
        for row, llr in enumerate(X):
            res = self.decoder_.decode(llr)
            bits[row] = res.u[code.info_set][: code.k]
            self.tau_[row] = res.tau
            self.cycles_[row] = res.cycles_without_mechanism
            self.cycles_mech_[row] = res.cycles_with_mechanism
        return bits

    def score(self, X, y) -> float:
        """Fraction of frames decoded without error (1 - FER)."""
        y = check_array(y, dtype=np.uint8, ensure_2d=True)
        pred = self.predict(X)
        if y.shape != pred.shape:
            raise ValueError(f"y has shape {y.shape}, expected {pred.shape}")
        return float(np.mean(np.all(pred == y, axis=1)))
