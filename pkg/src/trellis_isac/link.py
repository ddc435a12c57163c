"""
AWGN link simulation: channel, receiver and BER experiments.

The channel acts on time samples; the receiver applies the forward unitary
DFT (ideal synchronization), demaps each subcarrier to the nearest point and
multiplies the MSB stream by the syndrome former. Errors in the MSBs
propagate through H^T; nothing tries to decode the shaping codeword.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from . import ofdm
from .constellation import int_to_bits
from .errors import InvalidArgumentError
from .report import provenance, write_csv
from .shaper import ShapingConfig, seeded_payloads, shape_batch, unshaped_symbols
from .gf2 import syndrome

BER_COLUMNS = ["snr_db", "ber_s", "ber_lsb", "ber_bpsk_ref", "n_bits"]


@dataclass(frozen=True)
class ChannelConfig:
    """SNR is E|x|^2 / E|n|^2 per time sample; ``signal_power`` fixes E|x|^2,
    otherwise the mean power of the signal passed in is used."""

    snr_db: float
    seed: int = 0
    signal_power: float | None = None

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


def awgn(sig, ch: ChannelConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Add circular complex Gaussian noise. ``snr_db = inf`` returns a copy."""
    x = np.asarray(sig, dtype=np.complex128)
    if np.isposinf(ch.snr_db):
        return x.copy()
    power = ch.signal_power if ch.signal_power is not None else float(np.mean(np.abs(x) ** 2))
    if not np.isfinite(power):
        raise InvalidArgumentError("signal power must be finite")
    rng = rng if rng is not None else np.random.default_rng(ch.seed)
    sigma = np.sqrt(power / ch.snr_linear / 2.0)
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return x + sigma * noise


class Recovered(NamedTuple):
    s: np.ndarray  # (..., G, M-1) syndrome bits
    b: np.ndarray  # (..., N, n_lsb) LSB bits
    raw_msb: np.ndarray  # (..., G, m_s-1, n_msb)
    msb: np.ndarray  # (..., N) demapped MSB labels
    lsb: np.ndarray  # (..., N) demapped LSB labels


def recover_info(received, cfg: ShapingConfig) -> Recovered:
    """Receiver decisions for frequency-domain symbols of shape (..., N)."""
    received = np.asarray(received, dtype=np.complex128)
    if received.shape[-1] != cfg.n_subcarriers:
        raise InvalidArgumentError(f"expected {cfg.n_subcarriers} subcarriers, got {received.shape[-1]}")
    c = cfg.constellation
    msb, lsb = cfg.group.demap_nearest(received)
    grouped = msb.reshape(msb.shape[:-1] + (cfg.n_groups, cfg.m_s))
    w = grouped[..., 0]
    raw = grouped[..., 1:] ^ w[..., None]
    s_hat = syndrome(int_to_bits(w, c.n_msb), cfg.code)
    return Recovered(s_hat, int_to_bits(lsb, c.n_lsb), int_to_bits(raw, c.n_msb), msb, lsb)


def q_function(x):
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


def bpsk_theory(snr_db):
    """Q(sqrt(2 SNR)) for SNR = E|x|^2 / E|n|^2 with complex noise."""
    return q_function(np.sqrt(2.0 * 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)))


@dataclass(frozen=True, eq=False)
class BerCurve:
    snr_db: np.ndarray
    ber_s: np.ndarray
    ber_lsb: np.ndarray
    ber_bpsk_ref: np.ndarray
    n_bits: int  # s bits per SNR point; the BPSK reference uses the same count
    n_bits_lsb: int
    seed: int
    config_hash: str = ""

    def std_error(self, ber, n=None):
        n = self.n_bits if n is None else n
        ber = np.asarray(ber)
        return np.sqrt(np.maximum(ber * (1 - ber), 1.0 / n) / n)

    def rows(self):
        for i, snr in enumerate(self.snr_db):
            yield snr, self.ber_s[i], self.ber_lsb[i], self.ber_bpsk_ref[i], self.n_bits

    def to_csv(self, path, **extra_meta):
        meta = provenance(self.config_hash, self.seed, n_bits_lsb=self.n_bits_lsb, **extra_meta)
        return write_csv(path, BER_COLUMNS, self.rows(), meta)


def ber_experiment(cfg: ShapingConfig, snr_grid, n_symbols: int, seed: int = 0,
                   shaped: bool = True, chunk: int = 1000) -> BerCurve:
    """Monte-Carlo BER of the shaped link against a BPSK reference.

    Symbols are shaped once and reused for every SNR point. Symbol ``i``
    draws its payload from (seed, 0, i) and its noise at SNR index ``j``
    from (seed, 1, i, j), so results do not depend on ``chunk``.
    """
    if n_symbols < 1:
        raise InvalidArgumentError("n_symbols must be at least 1")
    snr_grid = np.asarray(snr_grid, dtype=float)
    err_s = np.zeros(snr_grid.size, dtype=np.int64)
    err_lsb = np.zeros(snr_grid.size, dtype=np.int64)
    n_s = n_lsb = 0
    power = cfg.target_power
    n = cfg.n_subcarriers
    for c0 in range(0, n_symbols, chunk):
        idx = np.arange(c0, min(c0 + chunk, n_symbols))
        payload = seeded_payloads(cfg, seed, idx)
        X = shape_batch(payload, cfg).X if shaped else unshaped_symbols(payload, cfg)
        x = ofdm.synthesize_time(X)
        s_ref = np.asarray(payload.s, dtype=np.uint8)
        b_ref = int_to_bits(payload.lsb, cfg.constellation.n_lsb)
        n_s += s_ref.size
        n_lsb += b_ref.size
        for i, snr in enumerate(snr_grid):
            noise = np.empty_like(x)
            for row, sym in enumerate(idx):
                rng = np.random.default_rng([seed, 1, int(sym), i])
                noise[row] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            y = x if np.isposinf(snr) else x + np.sqrt(power / 10.0 ** (snr / 10.0) / 2.0) * noise
            rec = recover_info(ofdm.analyze_freq(y), cfg)
            err_s[i] += np.count_nonzero(rec.s != s_ref)
            err_lsb[i] += np.count_nonzero(rec.b != b_ref)
    ber_bpsk = np.zeros(snr_grid.size)
    for i, snr in enumerate(snr_grid):
        rng = np.random.default_rng([seed, 2, i])
        bits = rng.integers(0, 2, n_s)
        tx = 2.0 * bits - 1.0
        rx = awgn(tx, ChannelConfig(snr, seed, signal_power=1.0), rng)
        ber_bpsk[i] = np.count_nonzero((rx.real > 0) != bits.astype(bool)) / n_s
    return BerCurve(snr_grid, err_s / n_s, err_lsb / n_lsb, ber_bpsk, n_s, n_lsb, seed, cfg.digest())
