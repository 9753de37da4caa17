"""Embeds complex quantum-theory models into real quantum theory and
verifies that all observable statistics are preserved."""

__version__ = "0.1.0"
