"""Sieve-backed prime arithmetic on exact integers.

Everything in here is deterministic and exact: primality at desk scale
is decided by trial division against sieved primes, never by a
probabilistic test, and valuations are computed by repeated exact
division.  The central data structure is a smallest-prime-factor table
(PrimeTable) which factors any integer up to its limit in O(log)
divisions.  Windows above the table limit are handled by a segmented
sieve so that operations like "largest prime below 4 million" never
need a table of that size.
"""

from __future__ import annotations

import logging
from array import array
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .errors import ResourceLimitError

log = logging.getLogger(__name__)

# spf entries are stored as 4-byte unsigned ints
DEFAULT_TABLE_MEMORY = 256 * 2**20
_SPF_ENTRY_BYTES = 4

# Growable cache of small primes used for trial division and as base
# primes of the segmented sieve.
_base_primes: list[int] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
_base_limit = 31


def _sieve_flags(limit: int) -> bytearray:
    """Composite-flag bytearray for 0..limit (flag 1 = composite)."""
    flags = bytearray(limit + 1)
    flags[0:2] = b"\x01\x01"
    for p in range(2, isqrt(limit) + 1):
        if not flags[p]:
            step = len(range(p * p, limit + 1, p))
            flags[p * p :: p] = b"\x01" * step
    return flags


def _extend_base_primes(limit: int) -> None:
    global _base_primes, _base_limit
    if limit <= _base_limit:
        return
    limit = max(limit, 2 * _base_limit)
    log.info("extending base prime cache to %d", limit)
    flags = _sieve_flags(limit)
    _base_primes = [i for i, c in enumerate(flags) if not c]
    _base_limit = limit


def simple_primes(limit: int) -> list[int]:
    """All primes <= limit, ascending."""
    if limit < 2:
        return []
    _extend_base_primes(limit)
    return _base_primes[: bisect_right(_base_primes, limit)]


def seed_prime_cache(primes: list[int]) -> bool:
    """Adopt an externally provided ascending prime list (e.g. from a
    cache file) if it is consistent; returns True when adopted."""
    global _base_primes, _base_limit
    if len(primes) < 2 or primes[0] != 2:
        return False
    if any(b <= a for a, b in zip(primes, primes[1:])):
        return False
    # spot-check consistency against the current cache before trusting
    known = simple_primes(min(primes[-1], 1000))
    if primes[: len(known)] != known:
        return False
    if primes[-1] > _base_limit:
        _base_primes = list(primes)
        _base_limit = primes[-1]
    return True


def cached_primes() -> list[int]:
    """The current contents of the small-prime cache."""
    return list(_base_primes)


def is_prime(n: int) -> bool:
    """Exact primality by trial division (desk scale: n up to ~10^12)."""
    if n < 2:
        return False
    if n <= _base_limit:
        i = bisect_right(_base_primes, n) - 1
        return i >= 0 and _base_primes[i] == n
    root = isqrt(n)
    for p in simple_primes(root):
        if n % p == 0:
            return False
    return True


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi via a segmented sieve."""
    if hi < 2 or hi < lo:
        return []
    lo = max(lo, 2)
    if hi <= _base_limit:
        i = bisect_right(_base_primes, lo - 1)
        j = bisect_right(_base_primes, hi)
        return _base_primes[i:j]
    width = hi - lo + 1
    flags = bytearray(width)
    for p in simple_primes(isqrt(hi)):
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start > hi:
            continue
        step = (hi - start) // p + 1
        flags[start - lo :: p] = b"\x01" * step
    return [lo + i for i, c in enumerate(flags) if not c]


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n (n >= 2)."""
    if n < 2:
        raise ValueError("next_prime requires n >= 2")
    width = 128
    lo = n + 1
    while True:
        ps = primes_in_range(lo, lo + width - 1)
        if ps:
            return ps[0]
        lo += width
        width *= 2


def largest_prime_leq(n: int) -> int:
    """Largest prime p <= n (n >= 2)."""
    if n < 2:
        raise ValueError("largest_prime_leq requires n >= 2")
    width = 128
    hi = n
    while True:
        ps = primes_in_range(max(2, hi - width + 1), hi)
        if ps:
            return ps[-1]
        hi -= width
        width *= 2
        if hi < 2:
            raise AssertionError("unreachable: no prime below n >= 2")


def p_adic_valuation(w, p: int) -> int:
    """The p-adic valuation of a nonzero rational w.

    Returns v with w = p**v * (a/b) where p divides neither a nor b.
    Additive under multiplication.  Raises ValueError for w = 0, whose
    valuation is not a finite integer.
    """
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    if isinstance(w, Fraction):
        if w == 0:
            raise ValueError("valuation of 0 is undefined")
        return _val(abs(w.numerator), p) - _val(w.denominator, p)
    if w == 0:
        raise ValueError("valuation of 0 is undefined")
    return _val(abs(w), p)


def _val(m: int, p: int) -> int:
    # valuation of a positive integer; hot path, no validation
    v = 0
    while True:
        q, r = divmod(m, p)
        if r:
            return v
        m = q
        v += 1


def introot(n: int, e: int) -> int:
    """floor(n ** (1/e)) computed exactly for n >= 0, e >= 1."""
    if n < 0 or e < 1:
        raise ValueError("introot requires n >= 0 and e >= 1")
    if e == 1 or n < 2:
        return n
    if e == 2:
        return isqrt(n)
    r = round(n ** (1.0 / e))
    while r > 0 and r**e > n:
        r -= 1
    while (r + 1) ** e <= n:
        r += 1
    return r


@dataclass
class PrimePower:
    """n = base ** exponent with base prime; exponent >= 2 marks a
    non-prime prime power."""

    base: int
    exponent: int
    value: int

    def __post_init__(self):
        if self.base**self.exponent != self.value:
            raise ValueError("inconsistent prime power")

    @property
    def is_nonprime(self) -> bool:
        return self.exponent >= 2


def prime_power_decompose(n: int) -> PrimePower | None:
    """Decompose n = p**e with p prime, or None if n is no prime power."""
    if n < 2:
        raise ValueError("prime_power_decompose requires n >= 2")
    for e in range(n.bit_length() - 1, 1, -1):
        b = introot(n, e)
        if b**e == n and is_prime(b):
            return PrimePower(b, e, n)
    if is_prime(n):
        return PrimePower(n, 1, n)
    return None


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization of n >= 2 as (prime, exponent) pairs."""
    if n < 2:
        raise ValueError("factorize requires n >= 2")
    out = []
    m = n
    for p in simple_primes(isqrt(n)):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        out.append((m, 1))
    return out


def greatest_prime_factor(n: int) -> int:
    return factorize(n)[-1][0]


def nonprime_prime_powers(limit: int) -> list[int]:
    """Sorted list of all p**e <= limit with p prime and e >= 2."""
    if limit < 4:
        return []
    out = []
    e = 2
    while 2**e <= limit:
        for p in simple_primes(introot(limit, e)):
            out.append(p**e)
        e += 1
    out.sort()
    return out


@dataclass
class PrimeTable:
    """Smallest-prime-factor table for 2..limit.

    smallest_prime_factor[i] is the least prime dividing i (entries 0
    and 1 are unused zeros); i is prime iff the entry equals i.  The
    table is immutable after construction and safe to share between
    threads.
    """

    limit: int
    smallest_prime_factor: array
    _primes: list[int] | None = field(default=None, repr=False, compare=False)

    def is_prime(self, i: int) -> bool:
        return 2 <= i <= self.limit and self.smallest_prime_factor[i] == i

    def primes(self) -> list[int]:
        if self._primes is None:
            spf = self.smallest_prime_factor
            self._primes = [i for i in range(2, self.limit + 1) if spf[i] == i]
        return self._primes

    def factorize(self, m: int) -> list[tuple[int, int]]:
        """Prime factorization of 2 <= m <= limit as (prime, exponent) pairs."""
        if not 2 <= m <= self.limit:
            raise ValueError(f"{m} outside table range 2..{self.limit}")
        spf = self.smallest_prime_factor
        out = []
        while m > 1:
            p = spf[m]
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        return out

    def prime_divisors(self, m: int) -> list[int]:
        return [p for p, _ in self.factorize(m)]

    def greatest_prime_factor(self, m: int) -> int:
        if not 2 <= m <= self.limit:
            raise ValueError(f"{m} outside table range 2..{self.limit}")
        spf = self.smallest_prime_factor
        g = 1
        while m > 1:
            p = spf[m]
            g = p
            while m % p == 0:
                m //= p
        return g


def build_prime_table(limit: int, *, memory_budget: int = DEFAULT_TABLE_MEMORY) -> PrimeTable:
    """Build the smallest-prime-factor table for 2..limit.

    Refuses limits whose table would not fit in memory_budget bytes.
    """
    if limit < 2:
        raise ValueError("build_prime_table requires limit >= 2")
    if _SPF_ENTRY_BYTES * (limit + 1) > memory_budget:
        raise ResourceLimitError(
            f"prime table for limit {limit} needs {_SPF_ENTRY_BYTES * (limit + 1)}"
            f" bytes, budget is {memory_budget}",
            bound=memory_budget,
        )
    spf = array("I", bytes(_SPF_ENTRY_BYTES * (limit + 1)))
    primes = simple_primes(limit)
    # Writing multiples of larger primes first lets the later, smaller
    # primes overwrite them, so each entry ends up with its least factor.
    # Starting at p*p misses no composite: if spf(m) = p then m >= p*p.
    for p in reversed(primes):
        if p * p > limit:
            continue
        count = (limit - p * p) // p + 1
        spf[p * p :: p] = array("I", [p]) * count
    for p in primes:
        spf[p] = p
    return PrimeTable(limit=limit, smallest_prime_factor=spf)
