"""Certified critical heights for polynomials of the form g(z^d)."""

from __future__ import annotations

__version__ = "0.1.0"
