"""Oblivious-transfer capacity lower bounds for the binary symmetric channel.

Exact bound evaluation (alphabet extension, recursive BSEC emulation,
polarization-based GEC emulation, interactive key agreement and their hybrid)
plus a finite-length simulator of the standard GEC protocol.
"""

__version__ = "0.1.0"
