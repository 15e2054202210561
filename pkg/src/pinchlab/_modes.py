"""Arithmetic mode selection.

Two modes exist:

* ``exact``  -- rational arithmetic (Python ints / fractions); identity checks
  must come out exactly equal.
* ``double`` -- IEEE double arithmetic; identity checks pass within 1e-12
  relative tolerance.

The default is ``exact``. The environment variable ``PINCHLAB_MODE`` overrides
it process-wide; individual operations also accept an explicit ``mode``
argument which wins over the environment.
"""

from __future__ import annotations

import os

EXACT = "exact"
DOUBLE = "double"

_VALID = (EXACT, DOUBLE)

# relative tolerance used by identity checks in double mode
DOUBLE_RTOL = 1e-12


class UnsupportedModeError(ValueError):
    """Raised when an operation does not support the requested mode."""


def current_mode(override: str | None = None) -> str:
    """Resolve the arithmetic mode: explicit override > env var > 'exact'."""
    mode = override if override is not None else os.environ.get("PINCHLAB_MODE", EXACT)
    if mode not in _VALID:
        raise UnsupportedModeError(f"unknown arithmetic mode {mode!r}; expected one of {_VALID}")
    return mode
