"""Intrinsic homotopy invariants of finite metric data at every resolution."""

__version__ = "0.1.0"
