"""Twisted Fock spaces, twist certification and crossing symmetry at desk scale."""

from __future__ import annotations

__version__ = "0.1.0"

REPORT_SCHEMA = "twistkit-report-v1"
