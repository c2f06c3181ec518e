"""Confident operating regions mined from adaptively sampled BER sweeps."""

__version__ = "0.1.0"
