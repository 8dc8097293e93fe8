"""Exact-arithmetic desk calculator for finite-dimensional modules of the
hyper loop algebra of sl2 over prime fields and discrete valuation rings."""

__version__ = "0.1.0"
