import math
from fractions import Fraction

import numpy as np
import pytest

from fanostat.census import (
    count_rational_points,
    enumerate_hypersurfaces,
    first_moment,
    first_moment_direct,
    first_moment_dual,
    height_threshold_exponent,
    least_point_heights,
    local_census,
    predicted_census,
    predicted_first_moment,
    quadric_bad_primes,
    quadric_matrix,
    quadric_real_soluble,
)
from fanostat.localsolve import AdelicTarget
from fanostat.padic import PadicApproxVector
from fanostat.veronese import dimension, make_form, monomial_basis


def mkform(d, n, **monos):
    b = monomial_basis(d, n)
    coeffs = [0] * b.size
    for key, val in monos.items():
        exps = tuple(int(ch) for ch in key[2:])
        coeffs[b.index(exps)] = val
    return make_form(d, n, coeffs)


def test_theta():
    assert height_threshold_exponent(3, 2) == Fraction(8, 8)
    for d in range(2, 6):
        for n in range(d, 10):
            try:
                th = height_threshold_exponent(n, d)
            except ValueError:
                continue
            assert (th <= 1) == (n >= 2 * d - 1), (n, d)
    # theta(n, n) = n + 1
    for n in (2, 3, 4):
        assert height_threshold_exponent(n, n) == n + 1


def test_enumerate_hypersurfaces():
    forms = enumerate_hypersurfaces(2, 2, 1)
    assert len(forms) == 6  # the monomial forms up to sign
    assert enumerate_hypersurfaces(2, 2, Fraction(1, 2)) == []
    # growth consistency: count approaches (V_N / 2 zeta(N)) A^N from above
    from fanostat.geom import unit_ball_volume
    from fanostat.numtheory import zeta

    N = dimension(2, 2)
    c2 = len(enumerate_hypersurfaces(2, 2, 2))
    c4 = len(enumerate_hypersurfaces(2, 2, 4))
    main = lambda A: unit_ball_volume(N) / (2 * zeta(N)) * A**N
    assert abs(c4 / main(4) - 1) < abs(c2 / main(2) - 1)


def test_count_rational_points_quadric_surface():
    # V(X0 X3 - X1 X2), trivial target, B = 2: 12 points up to sign
    f = mkform(2, 3, m_1001=1, m_0110=-1)
    t = AdelicTarget.trivial(3)
    assert count_rational_points(f, 2, t) == 12
    # no real zeros: 0 at any height
    g = mkform(2, 3, m_2000=1, m_0200=1, m_0020=1, m_0002=1)
    assert count_rational_points(g, 10, t) == 0
    # monotone in B and sigma
    c1 = count_rational_points(f, 2, AdelicTarget.trivial(3, Fraction(1, 2)))
    c2 = count_rational_points(f, 2, t)
    c3 = count_rational_points(f, 4, t)
    assert c1 <= c2 <= c3


def test_count_rational_points_sign_invariance():
    f = mkform(2, 3, m_1001=1, m_0110=-1)
    neg = make_form(2, 3, [-c for c in f.coeffs])
    t = AdelicTarget.trivial(3)
    assert count_rational_points(f, 3, t) == count_rational_points(neg, 3, t)
    # unit rescaling of the p-adic target residue does not change counts
    xi1 = PadicApproxVector.from_integers(3, 1, (1, 0, 0, 1))
    xi2 = PadicApproxVector.from_integers(3, 1, (2, 0, 0, 2))
    t1 = AdelicTarget(((3, 1, xi1),), (1, 0, 0, 0), Fraction(1))
    t2 = AdelicTarget(((3, 1, xi2),), (1, 0, 0, 0), Fraction(1))
    assert count_rational_points(f, 3, t1) == count_rational_points(f, 3, t2)


def test_first_moment_strategies_agree_trivial():
    t = AdelicTarget.trivial(3)
    for A, B in ((1.5, 1.5), (2, 2)):
        direct = first_moment_direct(2, 3, A, B, t)
        dual = first_moment_dual(2, 3, A, B, t)
        assert direct == dual, (A, B)
    assert first_moment(2, 3, 2, 2, t) == first_moment_direct(2, 3, 2, 2, t)


def test_first_moment_strategies_agree_nontrivial():
    xi3 = PadicApproxVector.from_integers(3, 1, (1, 0, 0, 1))
    t = AdelicTarget(((3, 1, xi3),), (1, 1, 1, 1), Fraction(1, 2))
    assert first_moment_direct(2, 3, 2, 2, t) == first_moment_dual(2, 3, 2, 2, t)


def test_first_moment_edge():
    t = AdelicTarget.trivial(3)
    assert first_moment(2, 3, Fraction(1, 2), 2, t) == 0
    assert first_moment(2, 3, 2, Fraction(1, 2), t) == 0


def test_predicted_first_moment_domain():
    t = AdelicTarget.trivial(2)
    with pytest.raises(ValueError):
        predicted_first_moment(2, 2, 2, 2, t)
    t3 = AdelicTarget.trivial(3)
    pred = predicted_first_moment(2, 3, 2, 2, t3, mc_samples=50000)
    assert pred.value > 0
    assert pred.inputs["coefficient_over_magnitude_scale"] > 0


def test_quadric_helpers():
    f = mkform(2, 3, m_2000=1, m_0200=1, m_0020=1, m_0002=1)
    assert not quadric_real_soluble(f)
    g = mkform(2, 3, m_2000=1, m_0200=1, m_0020=1, m_0002=-1)
    assert quadric_real_soluble(g)
    # degenerate: kernel point makes it soluble
    h = mkform(2, 3, m_2000=1, m_0200=1)
    assert quadric_real_soluble(h)
    assert quadric_bad_primes(h) == []
    # x0^2+x1^2+x2^2+x3^2: det(2M) = 16: bad primes {2}
    assert quadric_bad_primes(f) == [2]
    m = quadric_matrix(mkform(2, 3, m_1100=1))
    assert m[0][1] == 1 and m[1][0] == 1 and m[0][0] == 0


def test_quadric_sum_of_squares_insoluble_at_2():
    from fanostat.localsolve import decide_padic_solubility

    f = mkform(2, 3, m_2000=1, m_0200=1, m_0020=1, m_0002=1)
    res = decide_padic_solubility(f, 2, depth_budget=5)
    assert res.verdict == "no"
    # and soluble at every odd prime (spot-check 3, 5)
    for p in (3, 5):
        assert decide_padic_solubility(f, p, depth_budget=3).verdict == "yes"


def test_local_census_micro():
    t = AdelicTarget.trivial(3)
    report = local_census(2, 3, 1, P=2, target=t, depth_budget=4)
    # the six monomial-coefficient quadrics... N = 10 axes: 10 forms
    assert report.total_forms == 10
    # each monomial quadric x M = 0 is everywhere soluble (kernel point)
    assert report.m_interval[0] == report.m_interval[1] == 20
    assert report.e_interval == (0, 0)
    assert report.vloc_interval == (10, 10)
    assert report.direct_vloc_interval == (10, 10)
    assert report.all_resolved


def test_local_census_identity_on_a_micro_instance():
    # A = 1.5: includes sums/differences of two monomials
    t = AdelicTarget.trivial(3)
    report = local_census(2, 3, 1.5, P=3, target=t, depth_budget=5)
    assert report.all_resolved, report.per_place
    m = report.m_interval[0]
    e = report.e_interval[0]
    assert report.vloc_interval == ((m - e) // 2, (m - e) // 2)
    assert report.direct_vloc_interval == report.vloc_interval
    # M is nonincreasing in P
    report2 = local_census(2, 3, 1.5, P=5, target=t, depth_budget=5)
    assert report2.m_interval[0] <= report.m_interval[0]


def test_predicted_census_contains_exact_micro():
    t = AdelicTarget.trivial(3)
    report = local_census(2, 3, 1.5, P=3, target=t, depth_budget=5)
    pred = predicted_census(2, 3, 1.5, t, P_trunc=3, depth=1, mc_samples=300,
                            rng=np.random.default_rng(0), budget=2 * 10**6)
    lo, hi = pred["finite_size_interval"]
    exact = report.vloc_interval[0]
    assert lo - 1e-9 <= exact <= hi + 1e-9, (lo, exact, hi)


def test_least_point_heights():
    t = AdelicTarget.trivial(3)
    heights, summary = least_point_heights(2, 3, 1.5, t, height_cap=9.0)
    by_form = {f: h for f, h in heights}
    quadric = mkform(2, 3, m_1001=1, m_0110=-1)
    if quadric in by_form:
        assert by_form[quadric] == pytest.approx(1.0)
    f_monomial = mkform(2, 3, m_2000=1)
    assert by_form[f_monomial] == pytest.approx(1.0)  # e1 lies on x0^2 = 0
    definite = mkform(2, 3, m_2000=1, m_0200=1, m_0020=1, m_0002=1)
    if definite in by_form:
        assert by_form[definite] is None
    assert all(0 <= row["fraction_below"] <= 1 for row in summary)
    fracs = [row["fraction_below"] for row in summary]
    assert fracs == sorted(fracs)  # nondecreasing in delta
