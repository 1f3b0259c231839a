"""Exact success probabilities of one iteration of Shor's algorithm.

All values are ``fractions.Fraction`` and refer to a base drawn uniformly
from {0, ..., N-1}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .errors import UnsupportedCase
from .numtheory import Factorization, euler_phi

Rational = Fraction


@dataclass(frozen=True)
class ClosedFormTerms:
    """The integer building blocks shared by every formula.

    ``minus_one_configs`` counts the 2-power-order tuples whose half-power is
    -1 in the odd/twice-odd case, i.e. sum(2^(j*l) for j < s_min).  It is only
    meaningful when l >= 1.
    """

    sum_s: int
    two_pow_sum: int
    s_min: int | None
    l: int
    minus_one_configs: int
    m_product: int
    p_product: int
    mprime_product: int

    @classmethod
    def of(cls, f: Factorization) -> ClosedFormTerms:
        odd = f.odd_factors
        l = len(odd)
        sum_s = sum(o.s for o in odd)
        s_min = min((o.s for o in odd), default=None)
        t = ((1 << (l * s_min)) - 1) // ((1 << l) - 1) if l else 0
        return cls(
            sum_s=sum_s,
            two_pow_sum=1 << sum_s,
            s_min=s_min,
            l=l,
            minus_one_configs=t,
            m_product=prod(o.m for o in odd),
            p_product=prod(o.p for o in odd),
            mprime_product=prod(o.m_prime for o in odd),
        )

    @property
    def T(self) -> int:
        return self.minus_one_configs


@dataclass(frozen=True)
class StepProbabilities:
    p_coprime: Fraction
    p_even_given_coprime: Fraction
    p_good_given_even: Fraction
    p_overall: Fraction

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.p_coprime, self.p_even_given_coprime, self.p_good_given_even, self.p_overall)


class FailureKind(enum.Enum):
    STEP_TWO_FAILS = "StepTwoFails"
    STEP_THREE_FAILS_FOUR = "StepThreeFails_Four"
    STEP_THREE_FAILS_PRIME_POWER = "StepThreeFails_PrimePower"
    STEP_THREE_FAILS_TWICE_PRIME_POWER = "StepThreeFails_TwicePrimePower"
    CAN_SUCCEED = "CanSucceed"


@dataclass(frozen=True)
class FailureClass:
    kind: FailureKind
    witness: tuple[int, int] | None = None

    @property
    def tag(self) -> str:
        return self.kind.value

    def __str__(self) -> str:
        if self.witness is None:
            return self.tag
        return f"{self.tag}({self.witness[0]},{self.witness[1]})"


def step1_probability(f: Factorization) -> Fraction:
    return Fraction(euler_phi(f), f.n)


def _even_exponent(f: Factorization) -> int:
    # 2^E is the size of the unit group divided by its odd-order part.
    return max(f.k0 - 1, 0) + sum(o.s for o in f.odd_factors)


def step2_probability(f: Factorization) -> Fraction:
    return 1 - Fraction(1, 1 << _even_exponent(f))


def step3_probability(f: Factorization) -> Fraction:
    """P(a^(r/2) != -1 mod N | a a unit of even order r).

    N = 2 has no unit of even order; 0 is returned so the overall product
    stays 0 there.
    """
    terms = ClosedFormTerms.of(f)
    if f.k0 >= 2:
        big = (1 << (f.k0 - 1)) * terms.two_pow_sum
        return Fraction(big - 2, big - 1)
    if terms.l == 0:
        return Fraction(0)
    return Fraction(terms.two_pow_sum - terms.T - 1, terms.two_pow_sum - 1)


def overall_probability(f: Factorization) -> StepProbabilities:
    p1 = step1_probability(f)
    p2 = step2_probability(f)
    p3 = step3_probability(f)
    return StepProbabilities(p1, p2, p3, p1 * p2 * p3)


def printed_overall_probability(f: Factorization) -> Fraction:
    """The two closed-form overall probabilities, evaluated literally.

    For N = 2 * odd the second form carries the odd-N coprimality ratio and
    comes out at exactly twice ``overall_probability``.  It is kept as written
    for cross-checking.
    """
    terms = ClosedFormTerms.of(f)
    if f.k0 >= 2:
        half = 1 << (f.k0 - 1)
        return Fraction(terms.m_product, 2 * terms.p_product) * Fraction(
            half * terms.two_pow_sum - 2, half
        )
    if terms.l == 0:
        raise UnsupportedCase("no closed-form overall probability for N = 2")
    return Fraction(terms.m_product, terms.p_product) * (terms.two_pow_sum - terms.T - 1)


def classify_failure(f: Factorization) -> FailureClass:
    if f.n == 2:
        return FailureClass(FailureKind.STEP_TWO_FAILS)
    if f.n == 4:
        return FailureClass(FailureKind.STEP_THREE_FAILS_FOUR)
    if f.k0 <= 1 and f.l == 1:
        (o,) = f.odd_factors
        kind = (
            FailureKind.STEP_THREE_FAILS_PRIME_POWER
            if f.k0 == 0
            else FailureKind.STEP_THREE_FAILS_TWICE_PRIME_POWER
        )
        return FailureClass(kind, (o.p, o.k))
    return FailureClass(FailureKind.CAN_SUCCEED)


def expected_iterations(f: Factorization) -> Fraction | None:
    """Mean number of iterations of the repeat loop, 1 / P(success); None if it never succeeds."""
    p = overall_probability(f).p_overall
    return 1 / p if p else None
