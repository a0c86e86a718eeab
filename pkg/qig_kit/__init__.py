"""Petz-metric information geometry of two-qubit variational circuits."""

__version__ = "0.1.0"
