"""Brute-force census of (Z/NZ)*: the ground truth for the closed forms.

Nothing here looks at the group structure.  Every residue a in [0, N) is
visited, its order is computed directly and its half-power tested against -1.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Iterator

import numpy as np

from .closedform import StepProbabilities
from .errors import InvalidInput, ResourceLimit
from .numtheory import (
    BATCH_MODULUS_LIMIT,
    Factorization,
    batch_mod_pow,
    batch_multiplicative_order,
    multiplicative_order,
)

DEFAULT_CENSUS_LIMIT = 10**6
CENSUS_LIMIT_ENV = "SHOR_CENSUS_LIMIT"
_CHUNK = 1 << 16


def census_limit() -> int:
    raw = os.environ.get(CENSUS_LIMIT_ENV)
    if raw is None:
        return DEFAULT_CENSUS_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"{CENSUS_LIMIT_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class ElementRecord:
    a: int
    gcd_with_n: int
    order: int | None
    order_is_even: bool
    half_power: int | None
    is_minus_one: bool
    success: bool
    factors_found: frozenset[int]

    def to_json(self) -> dict:
        d = asdict(self)
        d["factors_found"] = sorted(self.factors_found)
        return d


@dataclass(frozen=True)
class OracleCensus:
    """Exhaustive counts over a in {0, ..., N-1}.

    Partial censuses over disjoint sub-ranges of the same N add up
    component-wise, which is what makes the parallel split deterministic.
    """

    n: int
    total: int = 0
    coprime_count: int = 0
    even_order_count: int = 0
    minus_one_count: int = 0
    success_count: int = 0
    odd_order_count: int = 0
    gcd_shortcut_count: int = 0

    def __add__(self, other: OracleCensus) -> OracleCensus:
        if not isinstance(other, OracleCensus):
            return NotImplemented
        if other.n != self.n:
            raise InvalidInput(f"cannot merge censuses of {self.n} and {other.n}")
        return OracleCensus(
            self.n,
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)[1:]),
        )

    def counts(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)[1:]}


def element_record(a: int, f: Factorization) -> ElementRecord:
    n = f.n
    if not 0 <= a < n:
        raise InvalidInput(f"residue {a} outside [0, {n})")
    g = math.gcd(a, n)
    if g != 1:
        return ElementRecord(a, g, None, False, None, False, False, frozenset())
    r = multiplicative_order(a, f)
    if r % 2:
        return ElementRecord(a, g, r, False, None, False, False, frozenset())
    h = pow(a, r // 2, n)
    minus_one = h == n - 1
    found = frozenset(d for d in (math.gcd(h - 1, n), math.gcd(h + 1, n)) if 1 < d < n)
    return ElementRecord(a, g, r, True, h, minus_one, not minus_one, found)


def iter_records(f: Factorization) -> Iterator[ElementRecord]:
    for a in range(f.n):
        yield element_record(a, f)


def _census_scalar(f: Factorization, start: int, stop: int) -> OracleCensus:
    n = f.n
    coprime = even = minus = shortcut = 0
    for a in range(start, stop):
        g = math.gcd(a, n)
        if g != 1:
            shortcut += g < n
            continue
        coprime += 1
        r = multiplicative_order(a, f)
        if r % 2 == 0:
            even += 1
            minus += pow(a, r // 2, n) == n - 1
    return OracleCensus(
        n, stop - start, coprime, even, minus, even - minus, coprime - even, shortcut
    )


def _census_batch(f: Factorization, start: int, stop: int) -> OracleCensus:
    n = f.n
    a = np.arange(start, stop, dtype=np.int64)
    g = np.gcd(a, n)
    units = a[g == 1]
    shortcut = int(np.count_nonzero((g > 1) & (g < n)))
    r = batch_multiplicative_order(units, f)
    even_mask = r % 2 == 0
    half = batch_mod_pow(units[even_mask], r[even_mask] // 2, n)
    coprime = int(units.size)
    even = int(np.count_nonzero(even_mask))
    minus = int(np.count_nonzero(half == n - 1))
    return OracleCensus(
        n, stop - start, coprime, even, minus, even - minus, coprime - even, shortcut
    )


def census_range(f: Factorization, start: int, stop: int) -> OracleCensus:
    """Census restricted to a in [start, stop)."""
    if not 0 <= start <= stop <= f.n:
        raise InvalidInput(f"range [{start}, {stop}) outside [0, {f.n})")
    if f.n < BATCH_MODULUS_LIMIT:
        return _census_batch(f, start, stop)
    return _census_scalar(f, start, stop)


def _partition(n: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def _census_task(args):
    f, lo, hi = args
    return census_range(f, lo, hi)


def census(
    f: Factorization,
    workers: int = 1,
    chunk_size: int = _CHUNK,
    limit: int | None = None,
) -> OracleCensus:
    """Exact counts from enumerating every a in [0, N).

    The range is cut into chunks of ``chunk_size``; with ``workers > 1`` the
    chunks go to a process pool.  The result does not depend on either knob.
    """
    limit = census_limit() if limit is None else limit
    if f.n > limit:
        raise ResourceLimit(f"N = {f.n} exceeds census limit {limit}")
    if chunk_size < 1:
        raise InvalidInput("chunk_size must be positive")
    parts = _partition(f.n, chunk_size)
    if workers > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_census_task, [(f, lo, hi) for lo, hi in parts]))
    else:
        partials = [census_range(f, lo, hi) for lo, hi in parts]
    out = OracleCensus(f.n)
    for p in partials:
        out = out + p
    return out


def _census_of_n(n: int) -> OracleCensus:
    from .numtheory import factorize

    return census(factorize(n))


def census_many(ns, workers: int = 1, limit: int | None = None) -> dict[int, OracleCensus]:
    """Census for every N in ``ns``, optionally spread over a process pool."""
    ns = list(ns)
    limit = census_limit() if limit is None else limit
    too_big = [n for n in ns if n > limit]
    if too_big:
        raise ResourceLimit(f"N = {max(too_big)} exceeds census limit {limit}")
    if workers > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_census_of_n, ns, chunksize=max(1, len(ns) // (8 * workers))))
    else:
        results = [_census_of_n(n) for n in ns]
    return dict(zip(ns, results))


def oracle_probabilities(c: OracleCensus) -> StepProbabilities:
    even_ratio = Fraction(c.even_order_count, c.coprime_count)
    good_ratio = Fraction(c.success_count, c.even_order_count) if c.even_order_count else Fraction(0)
    return StepProbabilities(
        Fraction(c.coprime_count, c.total),
        even_ratio,
        good_ratio,
        Fraction(c.success_count, c.total),
    )
