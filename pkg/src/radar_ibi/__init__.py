"""Radar heartbeat interval estimation from harmonic-enhanced echoes."""

__version__ = "0.1.0"
