"""OFDM with index modulation: dither-based PAPR reduction on idle subcarriers.

Modules
-------
core      constellation, SAP codebook, system configuration
modem     bit mapping, interleaving, oversampled transforms, PAPR
dither    constraint regions and iterative clipping-and-filtering dither
channel   Rayleigh block fading, AWGN, Eb/N0 calibration
detect    exhaustive ML and power-based subblock detection
analysis  pairwise error probability and constraint-level solvers
harness   seeded Monte Carlo BER / CCDF runs with CSV output
"""
__version__ = "0.1.0"
