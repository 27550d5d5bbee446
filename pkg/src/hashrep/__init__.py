"""Analytics and simulators for hashing-based quantum repeaters."""

__version__ = "0.1.0"
