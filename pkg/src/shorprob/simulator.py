"""Classical runs of Shor's factoring loop with an exact order oracle.

The quantum order-finding step is replaced by ``multiplicative_order``, so
every run behaves as if phase estimation returned the true order.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import closedform
from .errors import InvalidInput
from .numtheory import Factorization, euler_phi, multiplicative_order

# Trials are drawn in fixed blocks, each from its own sub-stream, so the
# result does not depend on how blocks are spread over workers.
BLOCK_TRIALS = 4096


class RangeMode(enum.Enum):
    FULL = "full"  # a in {0, ..., N-1}, the denominator of the closed forms
    ALGORITHM = "algorithm"  # a in {2, ..., N-1}, as the factoring loop draws it


class Mode(enum.Enum):
    PAPER = "paper"  # only a factor from the half-power counts
    ALGORITHM = "algorithm"  # a lucky gcd(a, N) counts as well


class Outcome(enum.Enum):
    GCD_SHORTCUT = "GcdShortcut"
    TRIVIAL_GCD = "TrivialGcd"  # a = 0 in the full range: gcd(a, N) = N
    ODD_ORDER = "OddOrder"
    MINUS_ONE_HALF_POWER = "MinusOneHalfPower"
    FACTOR_FOUND = "FactorFound"


@dataclass(frozen=True)
class ShorRunRecord:
    a: int
    outcome: Outcome
    order: int | None = None
    factor: int | None = None

    @property
    def paper_model_success(self) -> bool:
        return self.outcome is Outcome.FACTOR_FOUND

    @property
    def algorithm_model_success(self) -> bool:
        return self.outcome in (Outcome.FACTOR_FOUND, Outcome.GCD_SHORTCUT)


@dataclass(frozen=True)
class SimulationReport:
    n: int
    trials: int
    successes: int
    estimate: Fraction
    exact_reference: Fraction
    abs_error: float
    z_score: float | None
    seed: int
    mode: Mode
    range_mode: RangeMode
    engine: str = "run"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based Philox generator for (seed, *stream)."""
    if seed < 0:
        raise InvalidInput("seed must be nonnegative")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(ss))


def _raw_bits(rng: np.random.Generator, bits: int) -> int:
    words = (bits + 63) // 64
    raw = rng.bit_generator.random_raw(words)
    value = 0
    for w in np.atleast_1d(raw):
        value = (value << 64) | int(w)
    return value >> (64 * words - bits)


def uniform_below(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) by rejection on the minimal bit width."""
    if n < 1:
        raise InvalidInput("empty range")
    if n == 1:
        return 0
    bits = (n - 1).bit_length()
    while True:
        x = _raw_bits(rng, bits)
        if x < n:
            return x


def bernoulli(rng: np.random.Generator, p: Fraction) -> bool:
    """True with probability exactly p, up to the 53-bit grid of the uniform draw."""
    u = _raw_bits(rng, 53)
    # u / 2^53 < num / den, compared in integers
    return u * p.denominator < p.numerator << 53


def draw_base(f: Factorization, rng: np.random.Generator, range_mode: RangeMode) -> int:
    if range_mode is RangeMode.ALGORITHM:
        if f.n < 3:
            raise InvalidInput("the {2, ..., N-1} range is empty for N < 3")
        return 2 + uniform_below(rng, f.n - 2)
    return uniform_below(rng, f.n)


def shor_run(
    f: Factorization,
    rng: np.random.Generator | None = None,
    range_mode: RangeMode = RangeMode.FULL,
    a: int | None = None,
) -> ShorRunRecord:
    """One pass through the factoring loop; ``a`` forces the base."""
    n = f.n
    if range_mode is RangeMode.ALGORITHM and n < 3:
        raise InvalidInput("the {2, ..., N-1} range is empty for N < 3")
    if a is None:
        if rng is None:
            raise InvalidInput("either rng or a forced base is required")
        a = draw_base(f, rng, range_mode)
    elif not 0 <= a < n:
        raise InvalidInput(f"base {a} outside [0, {n})")

    d = math.gcd(a, n)
    if d == n:
        return ShorRunRecord(a, Outcome.TRIVIAL_GCD)
    if d > 1:
        return ShorRunRecord(a, Outcome.GCD_SHORTCUT, factor=d)
    r = multiplicative_order(a, f)
    if r % 2:
        return ShorRunRecord(a, Outcome.ODD_ORDER, order=r)
    h = pow(a, r // 2, n)
    if h == n - 1:
        return ShorRunRecord(a, Outcome.MINUS_ONE_HALF_POWER, order=r)
    for x in (math.gcd(h - 1, n), math.gcd(h + 1, n)):
        if 1 < x < n:
            return ShorRunRecord(a, Outcome.FACTOR_FOUND, order=r, factor=x)
    # h^2 = 1 with h != +-1 always splits N
    raise AssertionError(f"no factor from half-power {h} mod {n}")


def success_probability(f: Factorization) -> Fraction:
    """Pr_gcd * Pr_even * Pr_non(-1), following the simulation pseudocode line by line."""
    phi = euler_phi(f)
    pr_gcd = Fraction(phi, f.n)
    terms = closedform.ClosedFormTerms.of(f)
    if f.k0 >= 2:
        big = (1 << (f.k0 - 1)) * terms.two_pow_sum
        pr_even = 1 - Fraction(1, big)
        pr_non_minus_one = Fraction(big - 2, big - 1)
    else:
        pr_even = 1 - Fraction(1, terms.two_pow_sum)
        if terms.l == 0:
            # N = 2: no unit of even order, so the last factor is moot
            pr_non_minus_one = Fraction(0)
        else:
            s = terms.s_min
            t = Fraction((1 << (terms.l * s)) - 1, (1 << terms.l) - 1)
            pr_non_minus_one = (terms.two_pow_sum - t - 1) / (terms.two_pow_sum - 1)
    return pr_gcd * pr_even * pr_non_minus_one


def simulate_bernoulli(f: Factorization, rng: np.random.Generator) -> bool:
    return bernoulli(rng, success_probability(f))


def _count_block(args) -> int:
    f, seed, block, size, mode, range_mode, engine = args
    rng = make_rng(seed, block)
    hits = 0
    if engine == "bernoulli":
        p = success_probability(f)
        for _ in range(size):
            hits += bernoulli(rng, p)
        return hits
    for _ in range(size):
        rec = shor_run(f, rng, range_mode)
        hits += rec.paper_model_success if mode is Mode.PAPER else rec.algorithm_model_success
    return hits


def exact_reference(f: Factorization, mode: Mode, range_mode: RangeMode) -> Fraction:
    """Exact per-trial success probability for the given counting mode and range.

    The full-range paper-model value is the closed form.  The other three use
    census counts when N is small enough to enumerate, and otherwise the same
    counts derived from phi(N) and the closed form.
    """
    overall = closedform.overall_probability(f).p_overall
    if mode is Mode.PAPER and range_mode is RangeMode.FULL:
        return overall
    from .oracle import census, census_limit

    if f.n <= census_limit():
        c = census(f)
        success, shortcut = c.success_count, c.gcd_shortcut_count
    else:
        success = overall * f.n
        shortcut = f.n - euler_phi(f) - 1
    hits = success + (shortcut if mode is Mode.ALGORITHM else 0)
    # a = 0 and a = 1 never succeed, so dropping them only shrinks the denominator
    denom = f.n if range_mode is RangeMode.FULL else f.n - 2
    return Fraction(hits) / denom


def monte_carlo(
    f: Factorization,
    trials: int,
    seed: int,
    mode: Mode = Mode.PAPER,
    range_mode: RangeMode = RangeMode.FULL,
    workers: int = 1,
    engine: str = "run",
) -> SimulationReport:
    """Repeat single iterations and compare the hit rate with the exact value.

    ``engine="run"`` executes the factoring loop; ``engine="bernoulli"`` draws
    directly against the closed-form probability (paper model, full range only).
    """
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if engine not in ("run", "bernoulli"):
        raise InvalidInput(f"unknown engine {engine!r}")
    if engine == "bernoulli" and (mode, range_mode) != (Mode.PAPER, RangeMode.FULL):
        raise InvalidInput("the bernoulli engine models the paper mode on the full range only")
    if range_mode is RangeMode.ALGORITHM and f.n < 3:
        raise InvalidInput("the {2, ..., N-1} range is empty for N < 3")

    blocks = [
        (f, seed, b, min(BLOCK_TRIALS, trials - lo), mode, range_mode, engine)
        for b, lo in enumerate(range(0, trials, BLOCK_TRIALS))
    ]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(_count_block, blocks))
    else:
        successes = sum(_count_block(b) for b in blocks)

    exact = exact_reference(f, mode, range_mode)
    estimate = Fraction(successes, trials)
    z = None
    if 0 < exact < 1:
        sigma = math.sqrt(float(exact) * (1 - float(exact)) / trials)
        z = float(estimate - exact) / sigma
    return SimulationReport(
        n=f.n,
        trials=trials,
        successes=successes,
        estimate=estimate,
        exact_reference=exact,
        abs_error=float(abs(estimate - exact)),
        z_score=z,
        seed=seed,
        mode=mode,
        range_mode=range_mode,
        engine=engine,
    )
