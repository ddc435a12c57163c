"""Trellis shaping of OFDM waveforms for integrated sensing and communication."""

__version__ = "0.1.0"
