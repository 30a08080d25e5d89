"""Core numerical modules: Hamiltonians, spectra, dynamics and entanglement."""

# Empty init file to avoid circular imports
