"""Coefficient vectors of the degree-N q-hypergeometric polynomial family.

The polynomial is

    P_N(z) = sum_{m=0}^{N} T_m z^m,
    T_m = (q^{-N};q)_m prod_j (alpha_j;q)_m
          / ( (q;q)_m prod_k (beta_k;q)_m ) * [(-1)^m q^{m(m-1)/2}]^{s-r},

built here by the consecutive-term ratio

    T_m / T_{m-1} = (1 - q^{m-1-N}) prod_j (1 - alpha_j q^{m-1})
                    / ( (1 - q^m) prod_k (1 - beta_k q^{m-1}) )
                    * [(-1) q^{m-1}]^{s-r},

which costs O(N(r+s)) and never recomputes a Pochhammer product. The monic
form divides by the leading coefficient; the closed rescale prefactor is kept
in tests only, as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .errors import DegreeMismatch, NoConvergence, OverflowRisk, ZeroLeadingCoefficient
from .params import ParamSet
from .precision import F64, PrecisionContext

OVERFLOW_LIMIT = 1e280


@dataclass(frozen=True)
class Poly:
    """Dense coefficient vector: coeffs[m] is the coefficient of z^m."""

    coeffs: Tuple
    monic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise ValueError("empty coefficient vector")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def qpochhammer(gamma, q, m: int):
    """(gamma; q)_m = prod_{i=0}^{m-1} (1 - gamma q^i); empty product is 1."""
    if m < 0:
        raise ValueError(f"order must be nonnegative, got {m}")
    out = 1 + 0 * gamma  # one, in the scalar type of gamma (exact for int/rational)
    power = 1 + 0 * q
    for _ in range(m):
        out = out * (1 - gamma * power)
        power = power * q
    return out


def coeffs_P(params: ParamSet, ctx: PrecisionContext = F64) -> Poly:
    """Coefficient vector of P_N via the consecutive-term ratio recurrence."""
    q = ctx.convert(params.q)
    alpha = [ctx.convert(a) for a in params.alpha]
    beta = [ctx.convert(b) for b in params.beta]
    N, diff = params.N, params.s - params.r

    term = ctx.make(1.0)
    coeffs = [term]
    qpow = ctx.make(1.0)  # q^{m-1} while filling coefficient m
    q_minus_N = q ** (-N)
    for m in range(1, N + 1):
        num = 1 - qpow * q_minus_N
        den = 1 - q**m
        for a in alpha:
            num = num * (1 - a * qpow)
        for b in beta:
            den = den * (1 - b * qpow)
        ratio = num / den
        if diff:
            ratio = ratio * (-qpow) ** diff
        term = term * ratio
        if ctx.name == "f64" and abs(term) > OVERFLOW_LIMIT:
            raise OverflowRisk(
                f"coefficient magnitude {abs(term):.3e} at m={m} exceeds {OVERFLOW_LIMIT:.0e};"
                " use extended precision"
            )
        coeffs.append(term)
        qpow = qpow * q
    return Poly(coeffs=tuple(coeffs), monic=False)


def to_monic(p: Poly) -> Poly:
    """Divide through by the leading coefficient; the lead is then set to exactly 1."""
    lead = p.coeffs[-1]
    if lead == 0:
        raise ZeroLeadingCoefficient("leading coefficient is zero")
    if p.monic:
        return p
    scaled = [c / lead for c in p.coeffs[:-1]]
    scaled.append(1 + 0 * lead)
    return Poly(coeffs=tuple(scaled), monic=True)


def eval_poly(p: Poly, z):
    """Horner evaluation from the highest coefficient down."""
    acc = p.coeffs[-1]
    for c in reversed(p.coeffs[:-1]):
        acc = acc * z + c
    return acc


def eval_poly_deriv(p: Poly, z):
    """Value and first derivative in one Horner pass."""
    acc = p.coeffs[-1]
    dacc = 0 * acc
    for c in reversed(p.coeffs[:-1]):
        dacc = dacc * z + acc
        acc = acc * z + c
    return acc, dacc


MAX_SERIES_TERMS = 10000


def eval_phi(alphas_full, params: ParamSet, z, tol: float):
    """Truncated series evaluation with numerator parameters alphas_full
    (length r+1; the extra leading entry plays the terminating role when it
    equals q^{-N} exactly).

    Terminates when three consecutive term magnitudes fall below tol * |partial
    sum| (or exactly, when a term ratio vanishes). Requires |q| < 1 for decay
    unless the series terminates.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if len(alphas_full) != params.r + 1:
        raise DegreeMismatch(
            f"expected {params.r + 1} numerator parameters, got {len(alphas_full)}"
        )
    q = params.q
    terminating = alphas_full[0] == q ** (-params.N)
    if abs(q) >= 1 and not terminating:
        raise ValueError("series evaluation requires |q| < 1 unless it terminates")

    diff = params.s - params.r
    total = 1.0 + 0.0 * q
    term = total
    qpow = 1.0 + 0.0 * q  # q^{p-1} while forming term p
    small_streak = 0
    for p in range(1, MAX_SERIES_TERMS + 1):
        if terminating and p > params.N:
            # the (alphas_full[0]; q)_p factor vanishes from here on
            return total
        num = 1.0 + 0.0 * q
        for a in alphas_full:
            num = num * (1 - a * qpow)
        den = 1 - qpow * q
        for b in params.beta:
            den = den * (1 - b * qpow)
        ratio = (num / den) * z
        if diff:
            ratio = ratio * (-qpow) ** diff
        if ratio == 0:
            return total
        term = term * ratio
        total = total + term
        qpow = qpow * q
        if abs(term) < tol * abs(total):
            small_streak += 1
            if small_streak == 3:
                return total
        else:
            small_streak = 0
    raise NoConvergence(f"series did not settle within {MAX_SERIES_TERMS} terms")


def monic_prefactor(params: ParamSet):
    """Closed rescale factor carrying P_N to its monic form (test oracle only)."""
    q = params.q
    N, diff = params.N, params.r - params.s
    num = qpochhammer(q, q, N)
    for b in params.beta:
        num = num * qpochhammer(b, q, N)
    den = qpochhammer(q ** (-N), q, N)
    for a in params.alpha:
        den = den * qpochhammer(a, q, N)
    out = num / den
    if diff:
        out = out * ((-1) ** N * q ** (N * (N - 1) // 2)) ** diff
    return out
