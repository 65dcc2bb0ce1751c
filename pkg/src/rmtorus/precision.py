"""Working-precision switch for irrational phase evaluation.

All exact data (integers, Fractions, quadratic irrationalities) is kept
symbolic; precision only enters when a value like e(k*theta) is finally
turned into a complex double.  The square root of D is then evaluated with
mpmath at the configured number of digits before rounding to float, so the
returned double is correctly rounded even when the exact numerator and
denominator are huge.

Two named settings are supported: "double" (35 digits of scratch precision,
ample for a correctly rounded 53-bit result) and "extended" (120 digits, for
callers that want to push tolerances below double rounding noise).  The
environment variable NCT_PRECISION selects the startup default; the CLI flag
overrides it per invocation.
"""

from __future__ import annotations

import os

_DPS = {"double": 35, "extended": 120}

_current = "double"


def set_precision(name: str) -> None:
    if name not in _DPS:
        raise ValueError(f"unknown precision setting {name!r}; expected one of {sorted(_DPS)}")
    global _current
    _current = name


def get_precision() -> str:
    return _current


def working_dps() -> int:
    """Scratch mpmath digits for the current setting."""
    return _DPS[_current]


_env = os.environ.get("NCT_PRECISION")
if _env:
    try:
        set_precision(_env)
    except ValueError:
        pass
