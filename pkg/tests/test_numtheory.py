import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from fanostat.numtheory import (
    ResidueSystem,
    crt_combine,
    divisor_count,
    euler_phi,
    factorize,
    jordan_totient,
    mobius,
    mod_inverse,
    reduced_residues,
    zeta,
)


def test_mobius_basic():
    assert mobius(1) == 1
    assert mobius(12) == 0
    # 30 = 2*3*5, three distinct primes (trial-division oracle)
    n, primes = 30, []
    for p in range(2, 31):
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
    assert len(primes) == 3
    assert mobius(30) == -1


def test_mobius_sum_identity():
    # sum_{d|n} mu(d) = [n == 1], accumulated sieve-style over n <= 10^4
    N = 10**4
    totals = [0] * (N + 1)
    for d in range(1, N + 1):
        mu = mobius(d)
        if mu:
            for m in range(d, N + 1, d):
                totals[m] += mu
    assert totals[1] == 1
    assert all(t == 0 for t in totals[2:])


def brute_jordan(k, q):
    count = 0
    for tup in _tuples(k, q):
        if math.gcd(math.gcd(*tup, q), q) == 1:
            count += 1
    return count


def _tuples(k, q):
    if k == 1:
        for a in range(q):
            yield (a, 0)  # pad so gcd(*tup, q) works uniformly
        return
    import itertools

    yield from itertools.product(range(q), repeat=k)


def test_jordan_examples():
    assert jordan_totient(2, 6) == 24
    assert jordan_totient(1, 10) == 4 == euler_phi(10)
    assert jordan_totient(5, 1) == 1


def test_jordan_matches_bruteforce():
    # direct count of k-tuples mod q with gcd(tuple, q) = 1, organized as a
    # DP over the running gcd (a divisor of q) so q = 60, k = 4 stays cheap
    for q in range(1, 61):
        residue_gcds = [math.gcd(a, q) for a in range(q)]
        counts = {}
        for g in residue_gcds:
            counts[g] = counts.get(g, 0) + 1
        for k in range(1, 5):
            state = {q: 1}  # gcd of the empty tuple with q
            for _ in range(k):
                nxt = {}
                for g, c in state.items():
                    for g2, c2 in counts.items():
                        gg = math.gcd(g, g2)
                        nxt[gg] = nxt.get(gg, 0) + c * c2
                state = nxt
            expected = state.get(1, 0)
            assert jordan_totient(k, q) == expected, (k, q)


def test_divisor_count():
    assert divisor_count(1) == 1
    assert divisor_count(12) == len([d for d in range(1, 13) if 12 % d == 0]) == 6
    for p in (2, 3, 5, 101):
        assert divisor_count(p) == 2


def test_zeta_against_closed_forms():
    assert abs(zeta(2, 1e-10) - math.pi**2 / 6) < 1e-9
    assert abs(zeta(4, 1e-10) - math.pi**4 / 90) < 1e-9
    assert abs(zeta(30, 1e-12) - (1 + 2**-30)) < 2 * 3**-30 + 1e-12


def test_zeta_against_mpmath_and_monotone():
    grid = [1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 9.0, 11.0]
    values = [zeta(s, 1e-11) for s in grid]
    for s, v in zip(grid, values):
        assert abs(v - float(mpmath.zeta(s))) < 1e-9, s
    assert all(a > b for a, b in zip(values, values[1:]))


def test_zeta_domain():
    with pytest.raises(ValueError):
        zeta(1.0)
    with pytest.raises(ValueError):
        zeta(0.5)


def test_crt_examples():
    assert crt_combine([(1, 2), (2, 3)]) == (5, 6)
    assert crt_combine([(4, 7)]) == (4, 7)
    combined, mod = crt_combine([((1, 2), 3), ((3, 0), 4)])
    assert mod == 12 and combined == (7, 8)
    # exhaustive oracle mod 12
    for x0 in range(12):
        for x1 in range(12):
            ok = x0 % 3 == 1 and x1 % 3 == 2 and x0 % 4 == 3 and x1 % 4 == 0
            assert ok == ((x0, x1) == (7, 8))


def test_crt_roundtrip_and_errors():
    combined, mod = crt_combine([((1, 2, 3), 5), ((0, 1, 2), 8), ((2, 2, 2), 9)])
    assert mod == 360
    for (res, m) in [((1, 2, 3), 5), ((0, 1, 2), 8), ((2, 2, 2), 9)]:
        assert tuple(c % m for c in combined) == res
    with pytest.raises(ValueError):
        crt_combine([(1, 4), (2, 6)])


def test_mod_inverse():
    assert mod_inverse(3, 7) == 5
    assert mod_inverse(1, 17) == 1
    assert mod_inverse(5, 12) == 5  # 25 = 2*12 + 1
    with pytest.raises(ValueError):
        mod_inverse(4, 12)


@given(st.integers(min_value=1, max_value=5000), st.integers(min_value=2, max_value=400))
def test_mod_inverse_property(a, m):
    if math.gcd(a, m) == 1:
        assert (a * mod_inverse(a, m)) % m == 1


def test_factorize_reconstructs():
    for n in (1, 2, 97, 128, 360, 2**16 + 1, 999983):
        prod = 1
        for p, e in factorize(n):
            prod *= p**e
        assert prod == n


def test_residue_system():
    rs = ResidueSystem.reduced_units(12)
    assert rs.modulus == 12
    assert [r[0] for r in rs.residues] == [1, 5, 7, 11] == reduced_residues(12)
    assert reduced_residues(1) == [0]
    with pytest.raises(ValueError):
        ResidueSystem(6, ((7,),))
