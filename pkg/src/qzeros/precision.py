"""Scalar precision contexts.

All numerical kernels in this package are written against plain arithmetic
(+, -, *, /, integer **, abs) so the same code runs on binary64 complex and
on mpmath arbitrary-precision complex. A PrecisionContext carries the scalar
constructor, the machine epsilon, and the tolerance scale factor relative to
binary64 (pass thresholds quoted in the contracts are binary64 thresholds;
extended precision tightens them by eps_ext / eps_f64).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

_F64_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class PrecisionContext:
    name: str
    eps: float
    # multiply any binary64 threshold by this to get the context's threshold
    tol_scale: float

    def make(self, re, im=0.0):
        """Build a scalar of this context from real/imag parts."""
        if self.name == "f64":
            return complex(re, im)
        return mpmath.mpc(re, im)

    def convert(self, x):
        """Coerce an arbitrary numeric into this context's scalar type."""
        if self.name == "f64":
            return complex(x)
        return mpmath.mpc(x)

    def to_complex(self, x) -> complex:
        """Project back to builtin complex (for reporting / f64-only consumers)."""
        return complex(x)

    @property
    def root_step_tol(self) -> float:
        # 1e-14 at binary64, scaled with eps elsewhere
        return 1e-14 * self.tol_scale


F64 = PrecisionContext(name="f64", eps=_F64_EPS, tol_scale=1.0)


def extended(dps: int = 50) -> PrecisionContext:
    """mpmath context with dps significant digits (shared global mpmath precision)."""
    mpmath.mp.dps = dps
    eps = float(mpmath.power(10, 1 - dps))
    return PrecisionContext(name="extended", eps=eps, tol_scale=eps / _F64_EPS)


def get_context(name: str) -> PrecisionContext:
    if name == "f64":
        return F64
    if name == "extended":
        return extended()
    raise ValueError(f"unknown precision context: {name!r}")
