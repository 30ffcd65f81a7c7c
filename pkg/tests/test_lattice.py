import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from fanostat.lattice import (
    IntegralLattice,
    balanced_basis,
    congruence_lattice,
    content,
    coset_meets_cone,
    from_rows,
    hyperplane_lattice,
    is_primitive_sublattice,
    lattice_from_generators,
    min_containing_det,
    minkowski_bounds,
    q_primitive,
    quotient_lattice,
    saturation_det,
    saturation_det_squared,
    shell_sublattice_census,
    small_det_point_census,
    solve_coset_representative,
    standard_lattice,
    successive_minima,
    torsion_index,
)
from fanostat.intlinalg import gram_det, norm2
from fanostat.veronese import monomial_basis, veronese


def random_lattice(rng, rank, ambient, lo=-6, hi=6):
    while True:
        rows = [tuple(rng.randint(lo, hi) for _ in range(ambient)) for _ in range(rank)]
        if gram_det(rows) != 0:
            return from_rows(rows)


def test_det_basics():
    assert standard_lattice(4).det_squared() == 1
    L = from_rows([(1, -1, 0), (0, 1, -1)])
    assert L.det_squared() == 3  # Gram [[2,-1],[-1,2]]
    from fanostat.lattice import RationalLattice

    assert RationalLattice(3, tuple()).det_squared() == 1  # rank 0 convention


def test_serialization_roundtrip():
    L = from_rows([(1, 2, 3), (0, 5, -1)])
    assert IntegralLattice.deserialize(L.serialize()) == L


def test_successive_minima_basic():
    m2, w = successive_minima(standard_lattice(2))
    assert m2 == [1, 1]
    m2, _ = successive_minima(from_rows([(2, 0), (0, 3)]))
    assert m2 == [4, 9]
    m2, _ = successive_minima(hyperplane_lattice((3, 1)))
    assert m2 == [10]  # generated by (1, -3)


def brute_minima(L, bound=8):
    vectors = []
    r = L.rank
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=r):
        if all(c == 0 for c in coeffs):
            continue
        v = tuple(
            sum(c * L.basis[i][t] for i, c in enumerate(coeffs))
            for t in range(L.ambient)
        )
        vectors.append((norm2(v), v))
    vectors.sort()
    minima, chosen = [], []
    for sq, v in vectors:
        if gram_det(chosen + [v]) != 0:
            chosen.append(v)
            minima.append(sq)
        if len(chosen) == r:
            break
    return minima


def test_successive_minima_against_bruteforce():
    rng = random.Random(17)
    for _ in range(30):
        rank = rng.randint(1, 3)
        L = random_lattice(rng, rank, rank + rng.randint(0, 1), -4, 4)
        m2, w = successive_minima(L)
        assert m2 == brute_minima(L)
        # witnesses attain the minima and are independent
        assert [norm2(v) for v in w] == m2
        assert gram_det(w) != 0


def test_minkowski_sandwich():
    rng = random.Random(23)
    for _ in range(60):
        rank = rng.randint(1, 4)
        L = random_lattice(rng, rank, rank + rng.randint(0, 2), -5, 5)
        lo, mid, hi = minkowski_bounds(L)
        assert lo <= mid * (1 + 1e-12) and mid <= hi * (1 + 1e-12)


def test_balanced_basis():
    # standard basis: all ratios 1
    rows, cert = balanced_basis(standard_lattice(3))
    assert sorted(map(tuple, map(sorted, (map(abs, r) for r in rows)))) == [
        (0, 0, 1),
        (0, 0, 1),
        (0, 0, 1),
    ]
    assert all(abs(x - 1) < 1e-9 for x in cert["norm_over_minima"])
    # rank-1: the single shortest generator
    rows, _ = balanced_basis(from_rows([(2, 4)]))
    assert rows == [(2, 4)] or rows == [(-2, -4)]
    # random lattices: a genuine basis whose ratios stay moderate
    rng = random.Random(5)
    for _ in range(20):
        L = random_lattice(rng, 3, 3, -9, 9)
        rows, cert = balanced_basis(L)
        assert from_rows(rows).key() == L.key()  # same lattice
        assert all(r < 4.0 for r in cert["norm_over_minima"])
        assert cert["quasi_orthogonality_lower"] > 0.01


def test_hyperplane_lattice():
    L = hyperplane_lattice((1, 0, 0))
    assert L.rank == 2 and L.det_squared() == 1
    assert hyperplane_lattice((1, 1, 1)).det_squared() == 3
    with pytest.raises(ValueError):
        hyperplane_lattice((0, 0, 0))
    # det(Lambda_c) = |c| / content(c), exactly in squares
    rng = random.Random(31)
    for _ in range(200):
        N = rng.randint(2, 8)
        c = [rng.randint(-9, 9) for _ in range(N)]
        if all(v == 0 for v in c):
            continue
        L = hyperplane_lattice(c)
        g = content(c)
        assert L.det_squared() * g * g == norm2(c)


def test_hyperplane_lattice_veronese():
    # det(Lambda_{nu(x)}) = |nu(x)| for primitive x
    rng = random.Random(37)
    for d, n in [(2, 2), (2, 3)]:
        basis = monomial_basis(d, n)
        for _ in range(40):
            x = [rng.randint(-4, 4) for _ in range(n + 1)]
            if all(v == 0 for v in x) or content(x) != 1:
                continue
            nu = veronese(basis, x)
            assert hyperplane_lattice(nu).det_squared() == norm2(nu)


def test_congruence_lattice():
    assert congruence_lattice((2, 4), 6).det_squared() == 9  # det = 3
    assert congruence_lattice((1, 1), 1).det_squared() == 1
    assert congruence_lattice((0, 0, 0), 5).det_squared() == 1
    rng = random.Random(41)
    for _ in range(150):
        N = rng.randint(2, 6)
        q = rng.randint(1, 12)
        c = [rng.randint(-6, 6) for _ in range(N)]
        L = congruence_lattice(c, q)
        d = q // math.gcd(content(c) if any(c) else q, q)
        assert L.det_squared() == d * d
        # membership: basis rows satisfy the congruence
        for row in L.basis:
            assert sum(a * b for a, b in zip(c, row)) % q == 0
        # all successive minima <= q
        m2, _ = successive_minima(L)
        assert all(m <= q * q for m in m2)
    # index oracle: residues satisfying the congruence
    c, q = (2, 4), 6
    count = sum(
        1 for x in itertools.product(range(q), repeat=2) if (2 * x[0] + 4 * x[1]) % q == 0
    )
    assert count == q * q // 3  # index 3


def test_quotient_lattice():
    Z2 = standard_lattice(2)
    Q = quotient_lattice(Z2, from_rows([(1, 0)]))
    assert Q.rank == 1 and Q.det_squared() == 1
    # det multiplicativity, exactly in rationals
    rng = random.Random(43)
    for _ in range(60):
        N = rng.randint(2, 5)
        L = random_lattice(rng, rng.randint(2, N), N, -4, 4)
        k = rng.randint(1, L.rank - 1)
        # primitive sublattice: saturate a random subset of the basis
        from fanostat.intlinalg import saturate_rows

        sub_rows = saturate_rows([L.basis[i] for i in range(k)])
        # saturation in Z^N may leave L; saturate within L instead
        coords = [L.coordinates(r) for r in sub_rows]
        if any(c is None for c in coords):
            # saturate the coordinate rows and map back
            crows = saturate_rows([L.coordinates(L.basis[i]) for i in range(k)])
            sub_rows = [
                tuple(
                    sum(cc * L.basis[j][t] for j, cc in enumerate(crow))
                    for t in range(N)
                )
                for crow in crows
            ]
        G = from_rows(sub_rows)
        if not is_primitive_sublattice(L, G):
            continue
        Q = quotient_lattice(L, G)
        assert Q.rank == L.rank - G.rank
        assert Q.det_squared() * G.det_squared() == L.det_squared()
    with pytest.raises(ValueError):
        quotient_lattice(standard_lattice(2), from_rows([(2, 0)]))  # not primitive


def test_saturation_det():
    assert saturation_det_squared([(1, 0), (0, 2)]) == 1
    assert saturation_det_squared([(3, 4)]) == 25  # primitive vector: |c|^2
    # c1=(1,1,0), c2=(0,2,2): minors gcd vs enumerated index
    rows = [(1, 1, 0), (0, 2, 2)]
    sq = saturation_det_squared(rows)
    # oracle: index of Z c1 + Z c2 inside its saturation by direct count
    from fanostat.intlinalg import saturate_rows, lattice_coordinates

    sat = saturate_rows(rows)
    index = 0
    for a in range(-2, 3):
        for b in range(-2, 3):
            v = [a * sat[0][t] + b * sat[1][t] for t in range(3)]
            coords = lattice_coordinates(rows, v)
            if coords is not None:
                index += 1
    # index of sublattice in saturation over the sampled fundamental box:
    # use determinant ratio instead (exact): det(rows)^2 / det(sat)^2
    assert gram_det(rows) % sq == 0
    assert gram_det(rows) // sq == 4  # index 2, squared


def test_content_and_torsion_index():
    assert content((2, 4, 6)) == 2
    assert content((0, 0, 0)) == 0
    assert torsion_index((0, 0)) == 0
    assert torsion_index((3, 3)) == 3
    assert torsion_index((2, 4), standard_lattice(2)) == 2
    L = from_rows([(1, 1), (0, 2)])
    assert torsion_index((2, 2), L) == 2  # (2,2) = 2*(1,1)


def test_q_primitive():
    assert q_primitive((1, 2, 3), 10)
    assert q_primitive((0, 0), 1)
    assert not q_primitive((0, 0), 2)
    assert not q_primitive((2, 2), 4)  # 2*(1,1), d=2 divides 4
    assert q_primitive((2, 2), 3)


def brute_min_containing_det2(x, r, reach=8):
    """Oracle: exhaustive companions with a generous radius."""
    m = len(x)
    best = None
    rng_pts = [
        p
        for p in itertools.product(range(-reach, reach + 1), repeat=m)
        if any(p)
    ]
    for combo in itertools.combinations(rng_pts, r - 1):
        rows = [tuple(x)] + [tuple(c) for c in combo]
        if gram_det(rows) == 0:
            continue
        sq = saturation_det_squared(rows)
        if best is None or sq < best:
            best = sq
    return best


def test_min_containing_det():
    val, sq, wit = min_containing_det((1, 0, 0), 2)
    assert sq == 1 and wit.rank == 2
    # paper bound 1 <= d_r(x) <= |x|
    rng = random.Random(47)
    for _ in range(40):
        x = tuple(rng.randint(-5, 5) for _ in range(3))
        if not any(x) or content(x) != 1:
            continue
        for r in (1, 2, 3):
            val, sq, wit = min_containing_det(x, r)
            assert 1 <= Fraction(sq)
            assert Fraction(sq) <= norm2(x)
            assert wit.contains(x)
            assert wit.rank == r
    # brute-force oracle at small size
    v, sq, _ = min_containing_det((6, 10, 15), 2)
    assert sq == brute_min_containing_det2((6, 10, 15), 2, reach=9)


def test_coset_meets_cone():
    Z2 = standard_lattice(2)
    # trivial constraints: any nonzero point
    assert coset_meets_cone(Z2, (0, 0), 1, (1, 0), Fraction(1))
    # cone too narrow around a non-lattice direction intersected with a line
    L = from_rows([(1, 0)])
    assert not coset_meets_cone(L, (0, 0), 1, (0, 1), Fraction(1, 2))
    assert coset_meets_cone(L, (0, 0), 1, (1, 1), Fraction(3, 4))  # sin45 < 3/4
    assert not coset_meets_cone(L, (0, 0), 1, (1, 1), Fraction(7, 10))  # sin45 > 0.7
    # congruence: points of Z^2 ≡ u(1,1) mod 3 in a narrow cone around e0
    assert coset_meets_cone(Z2, (1, 1), 3, (1, 0), Fraction(1, 10))
    # narrow cone around e0 but coset misses the axis... still hits far out
    assert coset_meets_cone(Z2, (1, 2), 5, (1, 0), Fraction(1, 50))


def test_coset_meets_cone_against_bruteforce():
    rng = random.Random(53)
    for _ in range(80):
        m = rng.randint(2, 3)
        rank = rng.randint(1, m)
        L = random_lattice(rng, rank, m, -3, 3)
        q = rng.choice([1, 2, 3])
        c = tuple(rng.randint(0, q - 1) if q > 1 else 0 for _ in range(m))
        if not q_primitive(c, q) if any(c) or q == 1 else True:
            continue
        if any(c) and math.gcd(content(c), q) != 1:
            continue
        if not any(c) and q != 1:
            continue
        xi = tuple(rng.randint(-2, 2) for _ in range(m))
        if not any(xi):
            continue
        sigma = Fraction(rng.choice([1, 2, 3]), 3)
        got = coset_meets_cone(L, c, q, xi, sigma)
        # brute force within a generous ball
        from fanostat.geom import Cone, cone_member

        cone = Cone(xi, sigma)
        found = False
        for coeffs in itertools.product(range(-12, 13), repeat=rank):
            if all(v == 0 for v in coeffs):
                continue
            x = tuple(
                sum(cc * L.basis[i][t] for i, cc in enumerate(coeffs)) for t in range(m)
            )
            if q > 1:
                ok = any(
                    all((xx - u * cc) % q == 0 for xx, cc in zip(x, c))
                    for u in range(1, q)
                    if math.gcd(u, q) == 1
                )
                if not ok:
                    continue
            if cone_member(cone, x):
                found = True
                break
        if found:
            assert got, (L.basis, c, q, xi, sigma)
        # note: brute force not finding a point in the window does not prove
        # absence; only assert the converse direction


def test_shell_census_rank1():
    count, lats = shell_sublattice_census(1, 1, [2], (0, 0), 1, (1, 0), Fraction(1))
    assert count == 2  # Z(1,1) and Z(1,-1)
    # narrow cone around e0 excludes both diagonal lines: sin45 > 0.5
    count, _ = shell_sublattice_census(1, 1, [2], (0, 0), 1, (1, 0), Fraction(1, 2))
    assert count == 0
    # wide-but-not-full cone: sin45 < 0.8
    count, _ = shell_sublattice_census(1, 1, [2], (0, 0), 1, (1, 0), Fraction(4, 5))
    assert count == 2


def oracle_shell_census_rank1(n, s, xi, sigma):
    """Independent scalar enumeration of primitive lines."""
    from fanostat.geom import Cone, cone_member

    cone = Cone(xi, Fraction(sigma))
    seen = set()
    s2 = Fraction(s) ** 2
    r = int(math.isqrt(int(s2))) + 1
    for v in itertools.product(range(-r, r + 1), repeat=n + 1):
        if not any(v) or content(v) != 1:
            continue
        sq = Fraction(norm2(v))
        if not (s2 / 4 < sq <= s2):
            continue
        canon = v if next(c for c in v if c) > 0 else tuple(-c for c in v)
        if canon in seen:
            continue
        if cone_member(cone, v):
            seen.add(canon)
    return len(seen)


def test_shell_census_rank1_oracle():
    for n in (1, 2):
        for s in (2, 3):
            for sigma in (Fraction(1), Fraction(1, 2)):
                got, _ = shell_sublattice_census(
                    1, n, [s], (0,) * (n + 1), 1, (1,) + (0,) * n, sigma
                )
                assert got == oracle_shell_census_rank1(n, s, (1,) + (0,) * n, sigma)


def test_shell_census_rank2_strategies_agree():
    # strategy B: generate from one big ball for both factors, then filter
    from fanostat.intlinalg import canonical_sign_mask, integer_ball, lattice_key, saturate_rows

    n = 2
    shells = [Fraction(2), Fraction(2)]
    xi = (1, 0, 0)
    count, lats = shell_sublattice_census(2, n, shells, (0, 0, 0), 1, xi, Fraction(1))
    pts = integer_ball(n + 1, 4, include_zero=False)
    pts = [tuple(int(v) for v in p) for p in pts[canonical_sign_mask(pts)]]
    seen = set()
    kept = set()
    for a, b in itertools.product(pts, repeat=2):
        rows = [a, b]
        if gram_det(rows) == 0:
            continue
        key = lattice_key(saturate_rows(rows))
        if key in seen:
            continue
        seen.add(key)
        L = IntegralLattice(n + 1, key)
        m2, _ = successive_minima(L)
        if all(Fraction(s) ** 2 / 4 < Fraction(v) <= Fraction(s) ** 2 for s, v in zip(shells, m2)):
            kept.add(key)
    assert count == len(kept)


def test_small_det_point_census():
    # Delta >= X, sigma = 1, q = 1: every nonzero point in the ball counts
    n, X = 2, 3
    count = small_det_point_census(2, n, X, X, (0, 0, 0), 1, (1, 0, 0), 1)
    pts_in_ball = sum(
        1
        for v in itertools.product(range(-3, 4), repeat=3)
        if any(v) and norm2(v) <= 9
    )
    assert count == pts_in_ball
    # Delta < 1: empty
    assert small_det_point_census(2, n, X, Fraction(1, 2), (0, 0, 0), 1, (1, 0, 0), 1) == 0
    # monotone in X and Delta
    c1 = small_det_point_census(2, n, 2, 2, (0, 0, 0), 1, (1, 0, 0), Fraction(1, 2))
    c2 = small_det_point_census(2, n, 3, 2, (0, 0, 0), 1, (1, 0, 0), Fraction(1, 2))
    c3 = small_det_point_census(2, n, 3, 3, (0, 0, 0), 1, (1, 0, 0), Fraction(1, 2))
    assert c1 <= c2 <= c3


def test_solve_coset_representative():
    L = hyperplane_lattice((1, 1, 1))
    x = solve_coset_representative(L, (1, 0, 2), 3)
    assert x is not None
    assert L.contains(x)
    assert all((a - b) % 3 == 0 for a, b in zip(x, (1, 0, 2)))
    # (1,1,1) mod 2 has no zero-sum representative? sum x = 0, x ≡ (1,1,1):
    # sum ≡ 3 ≡ 1 mod 2 but sum x = 0 ≡ 0: impossible
    assert solve_coset_representative(L, (1, 1, 1), 2) is None
