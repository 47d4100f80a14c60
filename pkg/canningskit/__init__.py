"""CanningsKit: genealogy simulation and limit-regime verification for mixed multinomial Cannings models."""

__version__ = "0.1.0"
