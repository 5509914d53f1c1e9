"""Dirichlet characters modulo a prime q, built from a primitive root.

For prime q every character mod q is chi_j(g^k) = omega^{jk} with
omega = e^{2 pi i / (q-1)} and g the smallest primitive root; j = 0 is the
principal character and the q - 2 characters with j != 0 are primitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .primes import is_prime


def primitive_root(q: int) -> int:
    """Smallest primitive root modulo the prime q."""
    if q == 2:
        return 1
    phi = q - 1
    fac = []
    m = phi
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, q):
        if all(pow(g, phi // f, q) != 1 for f in fac):
            return g
    raise DomainError(f"no primitive root found for {q}")  # unreachable for prime q


@dataclass(frozen=True)
class DirichletCharacterTable:
    """All q - 1 characters mod a prime q, indexed j = 0 .. q - 2.

    chi_j(a) = omega^{j * ind(a)} where g^{ind(a)} = a mod q; chi_0 is
    principal, every chi_j with j >= 1 is primitive (q prime).
    """

    q: int
    g: int
    ind: np.ndarray  # ind[a] for a in 0..q-1; ind[0] = -1 sentinel

    @property
    def n_characters(self) -> int:
        return self.q - 1

    @property
    def n_primitive(self) -> int:
        return self.q - 2

    def chi(self, j: int, a: int) -> complex:
        a = a % self.q
        if a == 0:
            return 0j
        return np.exp(2j * math.pi * (j * int(self.ind[a]) % (self.q - 1)) / (self.q - 1))

    def chi_values(self, j: int, a_values) -> np.ndarray:
        """Vectorized chi_j over integers (0 where q divides a)."""
        a = np.asarray(a_values, dtype=np.int64) % self.q
        out = np.zeros(a.shape, dtype=np.complex128)
        nz = a != 0
        k = (j * self.ind[a[nz]]) % (self.q - 1)
        out[nz] = np.exp(2j * math.pi * k / (self.q - 1))
        return out

    def character(self, j: int):
        """chi_j as a scalar callable on integers."""
        if not 0 <= j <= self.q - 2:
            raise DomainError(f"character index {j} out of range 0..{self.q - 2}")
        return lambda a: self.chi(j, a)


_table_cache: dict[int, DirichletCharacterTable] = {}


def build_character_table(q: int) -> DirichletCharacterTable:
    """Character table mod a prime q >= 3."""
    q = int(q)
    if q < 3 or not is_prime(q):
        raise DomainError(f"modulus must be a prime >= 3, got {q}")
    if q in _table_cache:
        return _table_cache[q]
    g = primitive_root(q)
    ind = np.full(q, -1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        ind[x] = k
        x = (x * g) % q
    table = DirichletCharacterTable(q=q, g=g, ind=ind)
    _table_cache[q] = table
    return table
