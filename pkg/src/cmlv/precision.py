"""Working-precision context shared by every numerical routine.

All extended-precision arithmetic goes through mpmath.  Routines never touch
the global mpmath precision directly; they open a local `workprec` window
derived from the context so that concurrent use and nesting stay safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

# Guard bits added on top of the requested precision inside evaluators, so
# that accumulated rounding stays far below series_tolerance.
GUARD_BITS = 32


@dataclass(frozen=True)
class PrecisionContext:
    """Precision, truncation and tolerance knobs for every numeric result.

    working_precision_bits: mantissa bits for mpmath arithmetic (>= 64).
    series_tolerance: target absolute error of truncated sums.
    qseries_order: default Fourier truncation order for built expansions.
    identity_tolerance: pass threshold for identity residuals.
    """

    working_precision_bits: int = 256
    series_tolerance: float = 1e-36
    qseries_order: int = 64
    identity_tolerance: float = 1e-30

    def __post_init__(self):
        if self.working_precision_bits < 64:
            raise ValueError("working_precision_bits must be >= 64")
        if not (self.series_tolerance > 0 and self.identity_tolerance > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.identity_tolerance < self.series_tolerance:
            raise ValueError("identity_tolerance must be >= series_tolerance")
        if self.qseries_order < 1:
            raise ValueError("qseries_order must be positive")

    def workprec(self, extra_bits: int = GUARD_BITS):
        """Context manager setting mpmath precision locally."""
        return mp.workprec(self.working_precision_bits + extra_bits)

    def scaled(self, extra_bits: int) -> "PrecisionContext":
        """Context with extra_bits more precision and a matching tighter
        series tolerance; used when a result's magnitude (e.g. j near the
        cusp) forces sub-absolute accuracy of the building blocks."""
        if extra_bits <= 0:
            return self
        return PrecisionContext(
            working_precision_bits=self.working_precision_bits + extra_bits,
            series_tolerance=self.series_tolerance * 2.0 ** (-extra_bits),
            qseries_order=self.qseries_order,
            identity_tolerance=self.identity_tolerance,
        )

    @property
    def tol(self) -> mpmath.mpf:
        return mpmath.mpf(self.series_tolerance)


DEFAULT_CTX = PrecisionContext()
