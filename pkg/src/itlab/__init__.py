"""Independent transversals in partitioned (hyper)graphs."""

__version__ = "0.1.0"
