"""Gamma-ratio kernels, Hankel transforms, stationary phase and localization."""
