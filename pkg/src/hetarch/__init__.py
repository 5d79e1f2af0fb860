"""hetarch: heterogeneous quantum microarchitecture design and simulation."""

__version__ = "0.1.0"
