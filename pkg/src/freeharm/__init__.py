"""Harmonic analysis on the free group F_d: convolution inequalities,
norm estimates, positive-definiteness tests and l^p thresholds."""

__version__ = "0.1.0"
