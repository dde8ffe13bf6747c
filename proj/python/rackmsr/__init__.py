"""Rack-aware MSR array codes: construction, erasure decoding, and repair."""

try:
    from ._rackmsr import Code, derive, omega
except ImportError:  # dev layout: extension built next to the package dir
    from _rackmsr import Code, derive, omega

__all__ = ["Code", "derive", "omega"]
