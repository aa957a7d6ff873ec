"""Simulation toolkit for the log-gamma directed polymer with stationary boundary conditions."""

__version__ = "0.1.0"
