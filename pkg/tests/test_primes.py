import pytest
from hypothesis import given, strategies as st

from mfunc.errors import DomainError
from mfunc.primes import (
    PrimeList,
    as_prime_tuple,
    first_n_primes,
    is_prime,
    primes_up_to,
)

from oracles import oracle_primes


def test_sieve_matches_trial_division():
    assert list(primes_up_to(1000)) == oracle_primes(1000)


def test_first_n_primes():
    assert list(first_n_primes(6)) == [2, 3, 5, 7, 11, 13]
    assert len(first_n_primes(100)) == 100


@given(st.integers(min_value=2, max_value=5000))
def test_is_prime_matches_trial_division(n):
    d = 2
    ref = True
    while d * d <= n:
        if n % d == 0:
            ref = False
            break
        d += 1
    assert is_prime(n) == ref


def test_primes_up_to_domain():
    with pytest.raises(DomainError):
        primes_up_to(1)


def test_prime_list_container_protocol():
    pl = primes_up_to(13)
    assert len(pl) == 6
    assert 11 in pl and 9 not in pl
    assert pl[0] == 2 and pl[-1] == 13
    assert list(pl.array()) == [2, 3, 5, 7, 11, 13]


def test_as_prime_tuple_sorts_and_validates():
    assert as_prime_tuple([5, 2, 3]) == (2, 3, 5)
    with pytest.raises(DomainError):
        as_prime_tuple([2, 9])
    with pytest.raises(DomainError):
        as_prime_tuple([2, 3, 3])
    assert as_prime_tuple(primes_up_to(7)) == (2, 3, 5, 7)
