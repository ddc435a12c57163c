"""
OFDM transforms and signal-quality metrics.

Frequency-domain symbols hold the subcarrier values X_k; time-domain signals
hold the samples x_n of the unitary inverse DFT, so Parseval holds without
extra scaling. Every function works along the last axis, so a stack of
symbols can be processed at once; scalar metrics come back as floats for 1-D
input and as arrays otherwise.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError, UndefinedMetricError


def _as_signal(a, name: str, min_len: int = 1) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 0:
        raise InvalidArgumentError(f"{name} must be a vector")
    if a.shape[-1] < min_len:
        raise InvalidArgumentError(f"{name} needs at least {min_len} samples, got {a.shape[-1]}")
    return a


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def synthesize_time(freq) -> np.ndarray:
    """Unitary IDFT: x_n = N^-1/2 sum_k X_k exp(j 2 pi k n / N)."""
    X = _as_signal(freq, "freq", min_len=2)
    return np.fft.ifft(X, axis=-1) * np.sqrt(X.shape[-1])


def analyze_freq(sig) -> np.ndarray:
    """Unitary DFT, the exact inverse of :func:`synthesize_time`."""
    x = _as_signal(sig, "sig", min_len=2)
    return np.fft.fft(x, axis=-1) / np.sqrt(x.shape[-1])


def papr(sig):
    """Peak-to-average power ratio (linear) of the time samples."""
    p = np.abs(_as_signal(sig, "sig")) ** 2
    mean = p.mean(axis=-1)
    if np.any(mean == 0.0):
        raise UndefinedMetricError("PAPR undefined for an all-zero signal")
    return _scalar(p.max(axis=-1) / mean)


def papr_db(sig):
    return _scalar(10.0 * np.log10(papr(sig)))


def aperiodic_autocorr(sig) -> np.ndarray:
    """r(l) = sum_{n=0}^{N-1-l} conj(x_n) x_{n+l} for l = 0..N-1.

    Zero-padded FFT; exact up to rounding.
    """
    x = _as_signal(sig, "sig")
    n = x.shape[-1]
    f = np.fft.fft(x, 2 * n, axis=-1)
    return np.fft.ifft(np.abs(f) ** 2, axis=-1)[..., :n]


def circular_autocorr(sig) -> np.ndarray:
    """r_c(l) = sum_n conj(x_n) x_{(n+l) mod N}."""
    x = _as_signal(sig, "sig")
    return np.fft.ifft(np.abs(np.fft.fft(x, axis=-1)) ** 2, axis=-1)


def freq_autocorr(freq) -> np.ndarray:
    """R(l) = sum_k conj(X_k) X_{k+l} over valid k, l = 0..N-1."""
    return aperiodic_autocorr(freq)


def sidelobe_energy(corr):
    """sum_{l>=1} |r(l)|^2 of one-sided correlation sequences."""
    corr = np.asarray(corr)
    return _scalar(np.sum(np.abs(corr[..., 1:]) ** 2, axis=-1))


def _normalized_isl(corr):
    main = np.abs(corr[..., 0]) ** 2
    if np.any(main == 0.0):
        raise UndefinedMetricError("ISL undefined for a zero-energy signal")
    return _scalar(np.sum(np.abs(corr[..., 1:]) ** 2, axis=-1) / main)


def isl(sig):
    """Normalized integrated sidelobe level of the aperiodic autocorrelation."""
    return _normalized_isl(aperiodic_autocorr(sig))


def isl_circular(sig):
    """ISL of the circular autocorrelation, i.e. the PSD-flatness proxy
    N sum|X_k|^4 / (sum|X_k|^2)^2 - 1."""
    return _normalized_isl(circular_autocorr(sig))


def to_db(value):
    with np.errstate(divide="ignore"):
        return _scalar(10.0 * np.log10(value))
