"""Exception types shared across ptfkit."""

import os


class PtfkitError(Exception):
    """Base class for library errors."""


class DimensionError(PtfkitError, ValueError):
    """Point or polynomial arity does not match."""


class CapExceeded(PtfkitError, ValueError):
    """An exhaustive computation was asked to go beyond its size cap."""


class ZeroPolynomialError(PtfkitError, ValueError):
    """A normalized quantity was requested of the zero polynomial."""


class PreconditionError(PtfkitError, ValueError):
    """An operation's documented precondition does not hold."""


DEFAULT_MAX_N = 24


def max_n():
    """Enumeration cap on the number of variables (``PTFKIT_MAX_N`` overrides)."""
    value = os.environ.get("PTFKIT_MAX_N")
    if value:
        return int(value)
    return DEFAULT_MAX_N


def check_cap(n, cap=None):
    cap = max_n() if cap is None else cap
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the enumeration cap {cap}")
