"""Partition functions from spectra and from their complex zeros/poles."""

__version__ = "0.1.0"
