"""nhqsim - Non-Hermitian qubit dynamics, exceptional points and multipartite entanglement."""

__version__ = "1.0.0"
__author__ = "nhqsim developers"
