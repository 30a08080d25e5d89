"""Sweeps, optimum search, traces and reproducible scenarios."""
