"""Exact toolkit for abelian cocycles, cube systems and Host-Kra groups over finite systems."""

__version__ = "0.1.0"
