"""Prime enumeration and the PrimeList container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PrimeList:
    """Ordered list of all primes up to ``limit``.

    Invariants: strictly increasing, each element prime, complete up to the
    limit. Instances behave as immutable sequences of python ints.
    """

    limit: int
    primes: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __getitem__(self, i):
        return self.primes[i]

    def __contains__(self, p):
        return p in self.primes

    def array(self) -> np.ndarray:
        return np.asarray(self.primes, dtype=np.int64)


def primes_up_to(limit: int) -> PrimeList:
    """All primes <= limit via an Eratosthenes sieve.

    Raises DomainError for limit < 2 (empty domain).
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"prime enumeration needs limit >= 2, got {limit}")
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    ps = tuple(int(p) for p in np.flatnonzero(sieve))
    return PrimeList(limit=limit, primes=ps)


def first_n_primes(n: int) -> PrimeList:
    """The first n primes, as a PrimeList whose limit is the n-th prime."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    # p_n < n(log n + log log n) for n >= 6; small n handled by the floor
    bound = 15
    while True:
        ps = primes_up_to(bound)
        if len(ps) >= n:
            sel = ps.primes[:n]
            return PrimeList(limit=sel[-1], primes=sel)
        bound *= 2


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality for moderate n."""
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def as_prime_tuple(P) -> tuple:
    """Accept a PrimeList or any iterable of primes; return a sorted tuple.

    Raises DomainError when an element is not prime (silent acceptance would
    corrupt every Euler-product computation downstream).
    """
    if isinstance(P, PrimeList):
        return P.primes
    ps = tuple(sorted(int(p) for p in P))
    if len(set(ps)) != len(ps):
        raise DomainError("prime set contains duplicates")
    for p in ps:
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
    return ps
