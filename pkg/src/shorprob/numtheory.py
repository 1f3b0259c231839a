"""Integer utilities: primality, factorization, totient, Carmichael lambda, orders.

Everything here works on arbitrary-precision Python ints and is a pure
function of its arguments.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InvalidInput, NotAUnit

TRIAL_DIVISION_BOUND = 10_000
DEFAULT_MR_ROUNDS = 64

# Deterministic for n < 3.3e24 (covers all 64-bit inputs).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i in range(limit + 1) if sieve[i]]


_SMALL_PRIMES = _small_primes(TRIAL_DIVISION_BOUND)


@dataclass(frozen=True)
class PrimePower:
    p: int
    k: int

    def __post_init__(self):
        if self.k < 1 or not is_prime(self.p):
            raise InvalidInput(f"invalid prime power {self.p}^{self.k}")

    @property
    def value(self) -> int:
        return self.p**self.k


@dataclass(frozen=True)
class OddFactor:
    """An odd prime power p^k together with the split p - 1 = 2^s * m, m odd."""

    p: int
    k: int
    s: int
    m: int

    @classmethod
    def of(cls, p: int, k: int) -> OddFactor:
        if p < 3 or p % 2 == 0 or k < 1:
            raise InvalidInput(f"invalid odd prime power {p}^{k}")
        s = two_adic_valuation(p - 1)
        return cls(p, k, s, (p - 1) >> s)

    @property
    def m_prime(self) -> int:
        """Odd part of the local group order (p - 1) * p^(k - 1)."""
        return self.m * self.p ** (self.k - 1)

    @property
    def value(self) -> int:
        return self.p**self.k


@dataclass(frozen=True)
class Factorization:
    """N = 2^k0 * prod(p_i^k_i) with the odd primes in increasing order."""

    n: int
    k0: int
    odd_factors: tuple[OddFactor, ...] = field(default=())

    def __post_init__(self):
        if self.n < 2 or self.k0 < 0:
            raise InvalidInput(f"invalid factorization of {self.n}")
        ps = [f.p for f in self.odd_factors]
        if any(a >= b for a, b in zip(ps, ps[1:])):
            raise InvalidInput("odd primes must be distinct and increasing")
        prod = 1 << self.k0
        for f in self.odd_factors:
            prod *= f.value
        if prod != self.n:
            raise InvalidInput(f"factors multiply to {prod}, not {self.n}")

    @classmethod
    def from_prime_powers(cls, powers: Mapping[int, int] | Iterable[tuple[int, int]]) -> Factorization:
        """Build a factorization from (prime, exponent) pairs, checking primality.

        Repeated primes have their exponents added.
        """
        items = powers.items() if isinstance(powers, Mapping) else powers
        merged: dict[int, int] = {}
        for p, k in items:
            if k < 1:
                raise InvalidInput(f"exponent must be >= 1, got {p}^{k}")
            if not is_prime(p):
                raise InvalidInput(f"{p} is not prime")
            merged[p] = merged.get(p, 0) + k
        if not merged:
            raise InvalidInput("empty factorization")
        k0 = merged.pop(2, 0)
        odd = tuple(OddFactor.of(p, merged[p]) for p in sorted(merged))
        n = 1 << k0
        for f in odd:
            n *= f.value
        return cls(n, k0, odd)

    @property
    def l(self) -> int:
        return len(self.odd_factors)

    @property
    def prime_powers(self) -> list[PrimePower]:
        out = [PrimePower(2, self.k0)] if self.k0 else []
        out.extend(PrimePower(f.p, f.k) for f in self.odd_factors)
        return out

    @property
    def primes(self) -> list[int]:
        return [pp.p for pp in self.prime_powers]

    @cached_property
    def carmichael(self) -> int:
        return carmichael_lambda(self)

    @cached_property
    def carmichael_primes(self) -> tuple[int, ...]:
        """Distinct primes dividing lambda(N); used to peel orders down."""
        lam = self.carmichael
        return tuple(factorize(lam).primes) if lam > 1 else ()

    def __str__(self) -> str:
        return "*".join(f"{pp.p}^{pp.k}" if pp.k > 1 else str(pp.p) for pp in self.prime_powers)


def two_adic_valuation(n: int) -> int:
    if n == 0:
        raise InvalidInput("valuation of 0 is undefined")
    return (n & -n).bit_length() - 1


def gcd(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise InvalidInput("gcd arguments must be nonnegative")
    if a == 0 and b == 0:
        raise InvalidInput("gcd(0, 0) is undefined")
    return math.gcd(a, b)


def mod_pow(base: int, exp: int, modulus: int) -> int:
    if modulus < 2:
        raise InvalidInput(f"modulus must be >= 2, got {modulus}")
    if exp < 0:
        raise InvalidInput("exponent must be nonnegative")
    return pow(base, exp, modulus)


def _miller_rabin(n: int, bases: Iterable[int]) -> bool:
    d = n - 1
    s = two_adic_valuation(d)
    d >>= s
    for a in bases:
        a %= n
        if a in (0, 1, n - 1):
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int, rounds: int = DEFAULT_MR_ROUNDS) -> bool:
    """Miller-Rabin test.

    Exact below 2**64 (fixed witness set).  Larger inputs get ``rounds``
    extra random bases on top of the fixed set; the bases are drawn from a
    generator seeded by ``n`` so the answer is reproducible.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    if n < 97 * 97:
        return True
    if not _miller_rabin(n, _MR_WITNESSES):
        return False
    if n < 1 << 64:
        return True
    rng = random.Random(n)
    return _miller_rabin(n, (rng.randrange(2, n - 1) for _ in range(rounds)))


def _pollard_brent(n: int, seed: int) -> int:
    """Return a nontrivial divisor of the odd composite n."""
    rng = random.Random(seed)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _factor_into(n: int, out: dict[int, int]) -> None:
    stack = [n]
    seed = 0
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        seed += 1
        d = _pollard_brent(m, seed)
        stack += [d, m // d]


def factorize(n: int) -> Factorization:
    """Trial division up to 10^4, then Brent's rho on what is left."""
    if n < 2:
        raise InvalidInput(f"cannot factorize {n}")
    found: dict[int, int] = {}
    rest = n
    for p in _SMALL_PRIMES:
        if p * p > rest:
            break
        if rest % p == 0:
            k = 0
            while rest % p == 0:
                rest //= p
                k += 1
            found[p] = k
    if rest > 1:
        if rest <= TRIAL_DIVISION_BOUND**2 or is_prime(rest):
            found[rest] = found.get(rest, 0) + 1
        else:
            _factor_into(rest, found)
    k0 = found.pop(2, 0)
    odd = tuple(OddFactor.of(p, found[p]) for p in sorted(found))
    return Factorization(n, k0, odd)


def euler_phi(f: Factorization) -> int:
    phi = 1 << (f.k0 - 1) if f.k0 else 1
    for of in f.odd_factors:
        phi *= (of.p - 1) * of.p ** (of.k - 1)
    return phi


def carmichael_lambda(f: Factorization) -> int:
    if f.k0 <= 1:
        lam = 1
    elif f.k0 == 2:
        lam = 2
    else:
        lam = 1 << (f.k0 - 2)
    for of in f.odd_factors:
        lam = math.lcm(lam, (of.p - 1) * of.p ** (of.k - 1))
    return lam


def multiplicative_order(a: int, f: Factorization) -> int:
    """Least r >= 1 with a^r = 1 (mod N).

    Starts from lambda(N) and divides out each prime of lambda(N) for as
    long as the power still collapses to 1.
    """
    n = f.n
    a %= n
    g = math.gcd(a, n)
    if g != 1:
        raise NotAUnit(a, n, g)
    r = f.carmichael
    for q in f.carmichael_primes:
        while r % q == 0 and pow(a, r // q, n) == 1:
            r //= q
    return r


# Batch variants for the exhaustive census.  Products of two residues must
# fit in int64, so these only accept moduli below 2^31.
BATCH_MODULUS_LIMIT = 1 << 31


def batch_mod_pow(bases, exps, modulus: int):
    """Elementwise bases**exps % modulus over int64 numpy arrays."""
    import numpy as np

    if not 2 <= modulus < BATCH_MODULUS_LIMIT:
        raise InvalidInput(f"batch modulus out of range: {modulus}")
    result = np.ones_like(bases)
    base = bases % modulus
    e = np.array(exps, dtype=np.int64, copy=True)
    while True:
        odd = (e & 1).astype(bool)
        if odd.any():
            result[odd] = result[odd] * base[odd] % modulus
        e >>= 1
        if not e.any():
            return result
        base = base * base % modulus


def batch_multiplicative_order(units, f: Factorization):
    """Orders of an int64 array of units mod N, by the same lambda peeling."""
    import numpy as np

    n = f.n
    r = np.full(units.shape, f.carmichael, dtype=np.int64)
    for q in f.carmichael_primes:
        alive = np.ones(units.shape, dtype=bool)
        while True:
            alive &= r % q == 0
            if not alive.any():
                break
            idx = np.flatnonzero(alive)
            cand = r[idx] // q
            hit = batch_mod_pow(units[idx], cand, n) == 1
            r[idx[hit]] = cand[hit]
            alive[idx[~hit]] = False
    return r
