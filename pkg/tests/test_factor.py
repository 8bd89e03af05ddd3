import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taulab import factor
from taulab.errors import PartialFactorizationError


class TestPrimesAndPrimality:
    def test_sieve_small(self):
        assert factor.primes_up_to(20) == [2, 3, 5, 7, 11, 13, 17, 19]
        assert factor.primes_up_to(1) == []

    def test_is_prime_matches_trial_division(self):
        def slow(n):
            if n < 2:
                return False
            d = 2
            while d * d <= n:
                if n % d == 0:
                    return False
                d += 1
            return True

        for n in range(0, 3000):
            assert factor.is_prime(n) == slow(n), n

    def test_is_prime_large(self):
        assert factor.is_prime(2**89 - 1)
        assert not factor.is_prime((2**89 - 1) * (2**61 - 1))
        # strong pseudoprime to base 2 alone
        assert not factor.is_prime(2047)


class TestFactorize:
    def test_conventions(self):
        assert factor.largest_prime_factor(0) == 1
        assert factor.largest_prime_factor(1) == 1
        assert factor.largest_prime_factor(-1) == 1

    def test_examples(self):
        f = factor.factorize(-1472)
        assert f.sign == -1 and f.factors == {2: 6, 23: 1}
        assert factor.largest_prime_factor(-1472) == 23
        assert factor.factorize(252).factors == {2: 2, 3: 2, 7: 1}
        assert factor.largest_prime_factor(252) == 7

    def test_perfect_powers(self):
        p = 1000003
        assert factor.factorize(p * p, trial_bound=10**3).factors == {p: 2}
        assert factor.factorize(p**3, trial_bound=10**3).factors == {p: 3}

    @given(st.integers(-(10**30), 10**30))
    @settings(max_examples=60, deadline=None)
    def test_round_trip(self, n):
        f = factor.factorize(n, trial_bound=10**4, rho_budget=10**6, allow_partial=True)
        assert f.value() == n
        for p in f.factors:
            assert factor.is_prime(p)
        if not f.is_complete:
            assert not factor.is_prime(f.cofactor)
            assert f.cofactor > f.cofactor_floor**2

    def test_determinism(self):
        n = 87178291199 * 87178291199 * 1299709
        a = factor.factorize(n)
        b = factor.factorize(n)
        assert a.factors == b.factors

    def test_partial_error_carries_cofactor(self):
        hard = (2**89 - 1) * (2**107 - 1)  # two large primes, rho will give up
        with pytest.raises(PartialFactorizationError) as exc:
            factor.factorize(hard, trial_bound=10**3, rho_budget=10**3)
        partial = exc.value.partial
        assert partial.cofactor == hard
        assert partial.cofactor_floor == 10**3
        assert partial.value() == hard

    def test_partial_allowed(self):
        hard = (2**89 - 1) * (2**107 - 1)
        f = factor.factorize(hard, trial_bound=10**3, rho_budget=10**3, allow_partial=True)
        assert not f.is_complete
        with pytest.raises(PartialFactorizationError):
            f.largest_prime()
        assert f.largest_known_prime() == 1

    def test_semiprime_within_budget(self):
        a, b = 999999937, 999999893
        f = factor.factorize(a * b, trial_bound=10**4, rho_budget=10**6)
        assert f.factors == {a: 1, b: 1}
