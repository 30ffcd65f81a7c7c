"""Family statistics over hypersurfaces of bounded coefficient height.

Two headline computations, each with an exact side and a predicted side:

1. the first moment: the total number of bounded-height rational points
   near an adelic target, summed over all hypersurfaces of height <= A,
   computed both directly (loop over forms, count points) and dually (loop
   over points, count forms through the point via the hyperplane lattice of
   the Veronese image): the two must agree exactly;

2. the local census: the number M(A, P) of coefficient vectors admitting
   local points near the target at every place up to P, the correction
   E(A, P) of those failing at some larger prime, and the identity
   #soluble-hypersurfaces = (M - E)/2, against the product-of-densities
   prediction.

Solubility verdicts are tri-state; counts touched by unknown verdicts are
reported as intervals, never silently resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .counting import VolumeEstimate, veronese_reciprocal_volume
from .errors import EnumerationBudgetExceeded
from .geom import unit_ball_volume
from .intlinalg import (
    bareiss_det,
    canonical_sign_mask,
    fincke_pohst,
    integer_ball,
    lll_reduce,
    norm2,
)
from .lattice import hyperplane_lattice
from .localsolve import (
    AdelicTarget,
    CongruenceCone,
    DensityInterval,
    TriState,
    classify_balls,
    decide_padic_solubility,
    decide_real_solubility,
    density_sandwich,
    local_density,
    translate_local_conditions,
)
from .numtheory import euler_phi, jordan_totient, primes_up_to, zeta
from .padic import PadicApproxVector
from .veronese import (
    Form,
    dimension,
    height_bound_norm2,
    make_form,
    monomial_basis,
    veronese,
    veronese_batch,
)


def height_threshold_exponent(n: int, d: int) -> Fraction:
    """theta(n, d) = (n^2 - 1)/((2n-1)(n+1-d) - d); <= 1 iff n >= 2d - 1."""
    den = (2 * n - 1) * (n + 1 - d) - d
    if den <= 0:
        raise ValueError("exponent undefined for this (n, d)")
    return Fraction(n * n - 1, den)


# ---------------------------------------------------------------------------
# enumerating the family


def enumerate_hypersurfaces(d: int, n: int, A, budget: int = 10**7):
    """One primitive coefficient vector per hypersurface (canonical sign)."""
    N = dimension(d, n)
    A2 = int(Fraction(A) ** 2)
    pts = integer_ball(N, A2, include_zero=False)
    if len(pts) > budget:
        raise EnumerationBudgetExceeded("coefficient ball too large", len(pts))
    pts = pts[np.gcd.reduce(np.abs(pts), axis=1) == 1]
    pts = pts[canonical_sign_mask(pts)]
    basis = monomial_basis(d, n)
    return [Form(basis, tuple(int(c) for c in row)) for row in pts]


def coefficient_matrix(forms) -> np.ndarray:
    return np.array([f.coeffs for f in forms], dtype=np.int64)


# ---------------------------------------------------------------------------
# N_V and the first moment


def _candidate_points(d: int, n: int, B, cone: CongruenceCone, budget: int = 10**7):
    """Canonical primitive x with H(x) <= B meeting the translated conditions."""
    bound = int(height_bound_norm2(d, n, B))
    if bound < 1:
        return np.empty((0, n + 1), dtype=np.int64)
    pts = integer_ball(n + 1, bound, include_zero=False)
    if len(pts) > budget:
        raise EnumerationBudgetExceeded("point ball too large", len(pts))
    pts = pts[np.gcd.reduce(np.abs(pts), axis=1) == 1]
    pts = pts[canonical_sign_mask(pts)]
    keep = []
    for row in pts:
        x = tuple(int(v) for v in row)
        if cone.congruence_ok(x) and cone.cone_ok(x):
            keep.append(x)
    return np.array(keep, dtype=np.int64) if keep else np.empty((0, n + 1), dtype=np.int64)


def count_rational_points(form: Form, B, target: AdelicTarget, budget: int = 10**7) -> int:
    """N_V: rational points up to sign with height <= B near the target."""
    cone = translate_local_conditions(target)
    pts = _candidate_points(form.basis.d, form.basis.n, B, cone, budget)
    if len(pts) == 0:
        return 0
    nu = veronese_batch(form.basis, pts.astype(object))
    vals = nu @ np.array(form.coeffs, dtype=object)
    return int(sum(1 for v in vals if v == 0))


def first_moment_direct(d: int, n: int, A, B, target: AdelicTarget, budget: int = 10**7) -> int:
    """Strategy 1: loop over forms, count their points (vectorized pairing)."""
    forms = enumerate_hypersurfaces(d, n, A, budget)
    cone = translate_local_conditions(target)
    pts = _candidate_points(d, n, B, cone, budget)
    if len(pts) == 0 or not forms:
        return 0
    basis = monomial_basis(d, n)
    NU = veronese_batch(basis, pts)  # safe in int64 at desk scale
    Amat = coefficient_matrix(forms)
    prods = Amat @ NU.T
    return int((prods == 0).sum())


def first_moment_dual(d: int, n: int, A, B, target: AdelicTarget, budget: int = 10**8) -> int:
    """Strategy 2: loop over points, count coefficient vectors through them.

    A point x lies on the hypersurface of a exactly when a is in the
    hyperplane lattice of nu(x); forms with |a| <= A through x are lattice
    points of that rank N-1 lattice in the ball, counted by exact
    enumeration and filtered to primitive vectors, up to sign.
    """
    cone = translate_local_conditions(target)
    pts = _candidate_points(d, n, B, cone)
    if len(pts) == 0:
        return 0
    basis = monomial_basis(d, n)
    A2 = Fraction(A) ** 2
    total = 0
    for row in pts:
        x = tuple(int(v) for v in row)
        nu = veronese(basis, x)
        lat = hyperplane_lattice(nu)
        reduced = lll_reduce(lat.basis)
        for vec, _sq in fincke_pohst(reduced, A2, budget=budget, canonical_sign=True):
            if math.gcd(*[abs(int(v)) for v in vec]) == 1:
                total += 1
    return total


def first_moment(d: int, n: int, A, B, target: AdelicTarget, budget: int = 10**8):
    """Both strategies; raises if they disagree (they cannot, exactness is
    the point), returns the common value."""
    direct = first_moment_direct(d, n, A, B, target, min(budget, 10**7))
    dual = first_moment_dual(d, n, A, B, target, budget)
    if direct != dual:
        raise AssertionError(f"first-moment strategies disagree: {direct} vs {dual}")
    return direct


def predicted_first_moment(
    d: int,
    n: int,
    A,
    B,
    target: AdelicTarget,
    volume: Optional[VolumeEstimate] = None,
    mc_samples: int = 200000,
    rng=None,
):
    """Main term C A^(N-1) B with
    C = V_{N-1}/(4 zeta(N-1)) * W(xi, sigma) * phi(q)/(J_{n+1}(q) zeta(n+1)),
    for the both-signs coefficient count; our form/point normalization
    (one per +- pair on both sides) absorbs the 1/4.
    """
    if not (n >= d >= 2) or (n, d) == (2, 2):
        raise ValueError("main term needs n >= d >= 2 and (n, d) != (2, 2)")
    N = dimension(d, n)
    q = target.q
    if volume is None:
        volume = veronese_reciprocal_volume(d, n, target.xi_inf, target.sigma_inf, mc_samples, rng)
    coeff = (
        unit_ball_volume(N - 1)
        / (4 * zeta(N - 1))
        * volume.value
        * euler_phi(q)
        / (jordan_totient(n + 1, q) * zeta(n + 1))
    )
    err = coeff / volume.value * volume.err if volume.value else 0.0
    Af, Bf = float(Fraction(A)), float(Fraction(B))
    sigma = float(Fraction(target.sigma_inf))
    magnitude_scale = sigma**n * euler_phi(q) / jordan_totient(n + 1, q)
    from .counting import Prediction

    # the coefficient's 1/4 cancels the two +- symmetries, so coeff A^{N-1} B
    # directly predicts the canonical-pairs count computed by first_moment
    return Prediction(
        coeff * Af ** (N - 1) * Bf,
        err * Af ** (N - 1) * Bf,
        "V_{N-1}/(4 zeta(N-1)) W phi(q)/(J_{n+1}(q) zeta(n+1)) A^{N-1} B",
        {
            "coefficient": coeff,
            "coefficient_over_magnitude_scale": coeff / magnitude_scale,
            "volume": volume,
            "N": N,
            "q": q,
        },
    )


# ---------------------------------------------------------------------------
# quadric fast paths (exact, d = 2 only)


def quadric_matrix(form: Form):
    """2M for f = x^T M x: integer symmetric matrix."""
    if form.basis.d != 2:
        raise ValueError("quadric helpers need d = 2")
    m = form.basis.n + 1
    mat = [[0] * m for _ in range(m)]
    for a, exps in zip(form.coeffs, form.basis.monomials):
        idx = [i for i, e in enumerate(exps) for _ in range(e)]
        i, j = idx[0], idx[1]
        if i == j:
            mat[i][i] = 2 * a
        else:
            mat[i][j] += a
            mat[j][i] += a
    return mat


def _is_positive_definite(mat) -> bool:
    m = len(mat)
    for k in range(1, m + 1):
        sub = [row[:k] for row in mat[:k]]
        if bareiss_det(sub) <= 0:
            return False
    return True


def quadric_real_soluble(form: Form) -> bool:
    """Exact: a real quadric has points iff its matrix is not definite."""
    mat = quadric_matrix(form)
    neg = [[-v for v in row] for row in mat]
    return not (_is_positive_definite(mat) or _is_positive_definite(neg))


def quadric_bad_primes(form: Form) -> list:
    """Finite places where plain Q_p-solubility can fail, certified.

    Degenerate quadrics vanish on their rational kernel, so they are soluble
    everywhere. Nondegenerate quadrics in >= 3 variables are soluble at every
    odd p not dividing det(2M): the reduction is nondegenerate, has a point
    by Chevalley-Warning, the point is smooth, and it lifts.
    """
    if form.basis.n + 1 < 3:
        raise ValueError("certified bad-prime sets need >= 3 variables")
    det = bareiss_det(quadric_matrix(form))
    if det == 0:
        return []
    from .numtheory import factorize

    bad = sorted({2} | {p for p, _ in factorize(abs(det)) if p != 2})
    return bad


# ---------------------------------------------------------------------------
# local census


@dataclass
class CensusReport:
    params: dict
    m_interval: tuple  # (lower, upper) for M(A, P)
    e_interval: tuple  # (lower, upper) for E(A, P)
    vloc_interval: tuple  # (M - E)/2 interval
    direct_vloc_interval: Optional[tuple]
    per_place: dict  # p -> {"yes": int, "no": int, "unknown": int}
    arch_tally: dict
    unresolved: int
    total_forms: int
    all_resolved: bool
    predicted: Optional[dict] = None

    def summary(self) -> str:
        lines = [
            f"forms (canonical): {self.total_forms}",
            f"M(A,P) in [{self.m_interval[0]}, {self.m_interval[1]}]",
            f"E(A,P) in [{self.e_interval[0]}, {self.e_interval[1]}]",
            f"#V^loc in [{self.vloc_interval[0]}, {self.vloc_interval[1]}]",
            f"unresolved forms: {self.unresolved}",
        ]
        return "\n".join(lines)


def _arch_verdict(form: Form, target: AdelicTarget, budget: int = 4000) -> TriState:
    if form.basis.d == 2 and Fraction(target.sigma_inf) == 1:
        if quadric_real_soluble(form):
            return TriState.yes({"kind": "quadric-signature"})
        return TriState.no({"kind": "quadric-definite"})
    return decide_real_solubility(form, target.xi_inf, target.sigma_inf, subdivision_budget=budget)


def _finite_verdict(form, p, target: AdelicTarget, depth_budget: int) -> TriState:
    e_p, xi = target.place(p)
    try:
        return decide_padic_solubility(form, p, xi, e_p, depth_budget=depth_budget)
    except EnumerationBudgetExceeded as exc:
        return TriState.unknown({"reason": "node budget", "detail": str(exc)})


def local_census(
    d: int,
    n: int,
    A,
    P: int,
    target: AdelicTarget,
    depth_budget: int = 3,
    extra_prime_bound: Optional[int] = None,
    budget: int = 10**7,
) -> CensusReport:
    """Exact M(A, P), E(A, P) and the derived #V^loc, all as intervals.

    M counts primitive coefficient vectors (both signs) soluble near the
    target at every place of S and every prime <= P; E counts those
    additionally failing at some prime > P. For quadrics the primes where
    failure is possible form a certified finite set, so E and the direct
    V^loc count close exactly whenever every verdict resolves.
    """
    forms = enumerate_hypersurfaces(d, n, A, budget)
    finite_ps = sorted(set(target.support) | set(primes_up_to(P)))
    per_place = {}
    arch_tally = {"yes": 0, "no": 0, "unknown": 0}
    states = []  # per form: dict place -> verdict
    for form in forms:
        st = {}
        st["inf"] = _arch_verdict(form, target)
        arch_tally[st["inf"].verdict] += 1
        states.append(st)
    for p in finite_ps:
        tally = {"yes": 0, "no": 0, "unknown": 0}
        for form, st in zip(forms, states):
            if any(v.verdict == "no" for v in st.values()):
                continue  # short-circuit: already out of M
            st[p] = _finite_verdict(form, p, target, depth_budget)
            tally[st[p].verdict] += 1
        per_place[p] = tally
    m_yes = m_unk = 0
    m_members = []  # indices with all-yes at S u {<=P} and arch
    m_possible = []
    for i, st in enumerate(states):
        verdicts = [v.verdict for v in st.values()]
        if any(v == "no" for v in verdicts):
            continue
        if all(v == "yes" for v in verdicts):
            m_yes += 1
            m_members.append(i)
        else:
            m_unk += 1
            m_possible.append(i)
    # E: members (and possibles) failing at some prime beyond P
    e_yes = e_unk = 0
    for i in m_members + m_possible:
        form = forms[i]
        if d == 2:
            extra = [p for p in quadric_bad_primes(form) if p > P and p not in target.support]
        else:
            bound = extra_prime_bound or (2 * P + 10)
            extra = [p for p in primes_up_to(bound) if p > P and p not in target.support]
        verdict = "yes-all"
        for p in extra:
            res = _finite_verdict(form, p, target, depth_budget)
            if res.verdict == "no":
                verdict = "fails"
                break
            if res.verdict == "unknown":
                verdict = "unknown"
        in_m_certain = i in m_members
        if verdict == "fails":
            if in_m_certain:
                e_yes += 1
            else:
                e_unk += 1
        elif verdict == "unknown":
            e_unk += 1
        states[i]["beyond_P"] = verdict
    # intervals over both-sign counts
    m_lo, m_hi = 2 * m_yes, 2 * (m_yes + m_unk)
    e_lo, e_hi = 2 * e_yes, 2 * (e_yes + e_unk)
    v_lo = (m_lo - e_hi) // 2
    v_hi = (m_hi - e_lo) // 2
    # direct V^loc where possible (quadrics: certified place lists)
    direct = None
    all_resolved = m_unk == 0 and e_unk == 0 and arch_tally["unknown"] == 0
    if d == 2:
        dv_lo = dv_hi = 0
        for i, st in enumerate(states):
            verdicts = [v.verdict for v in st.values() if isinstance(v, TriState)]
            beyond = st.get("beyond_P")
            if any(v == "no" for v in verdicts) or beyond == "fails":
                continue
            if all(v == "yes" for v in verdicts) and (beyond in ("yes-all", None)):
                if beyond is None:
                    # form never reached the beyond-P stage: it failed earlier
                    continue
                dv_lo += 1
                dv_hi += 1
            else:
                dv_hi += 1
        direct = (dv_lo, dv_hi)
    return CensusReport(
        params={"d": d, "n": n, "A": str(A), "P": P, "q": target.q, "depth_budget": depth_budget},
        m_interval=(m_lo, m_hi),
        e_interval=(e_lo, e_hi),
        vloc_interval=(v_lo, v_hi),
        direct_vloc_interval=direct,
        per_place=per_place,
        arch_tally=arch_tally,
        unresolved=m_unk + e_unk,
        total_forms=len(forms),
        all_resolved=all_resolved,
    )


# ---------------------------------------------------------------------------
# predicted census


def real_density_interval(
    d: int, n: int, target: AdelicTarget, samples: int = 400, rng=None, budget: int = 1500
) -> DensityInterval:
    """MC interval for the spherical density of real-soluble-near-target forms."""
    rng = rng or np.random.default_rng(0)
    N = dimension(d, n)
    yes = no = unk = 0
    fast_quadric = d == 2 and Fraction(target.sigma_inf) == 1
    for _ in range(samples):
        a = rng.standard_normal(N)
        coeffs = [int(round(c * 10**6)) for c in a]
        if all(c == 0 for c in coeffs):
            continue
        form = make_form(d, n, coeffs, primitive=False)
        if fast_quadric:
            if quadric_real_soluble(form):
                yes += 1
            else:
                no += 1
            continue
        res = decide_real_solubility(form, target.xi_inf, target.sigma_inf, subdivision_budget=budget)
        if res.verdict == "yes":
            yes += 1
        elif res.verdict == "no":
            no += 1
        else:
            unk += 1
    m = yes + no + unk
    if m == 0:
        return DensityInterval(Fraction(0), Fraction(1), "monte-carlo")
    se = math.sqrt(0.25 / m)
    lo = max(0.0, yes / m - 4 * se)
    hi = min(1.0, (yes + unk) / m + 4 * se)
    return DensityInterval(Fraction(lo).limit_denominator(10**9), Fraction(hi).limit_denominator(10**9), "monte-carlo")


def predicted_census(
    d: int,
    n: int,
    A,
    target: AdelicTarget,
    P_trunc: int = 3,
    depth: int = 1,
    use_sandwich: bool = False,
    mc_samples: int = 400,
    rng=None,
    budget: int = 10**7,
    tail_constant: Fraction = Fraction(4),
) -> dict:
    """Interval-valued main term for #V^loc(A).

    Product of local density intervals for p in S and p <= P_trunc, a tail
    interval [prod_{p > P_trunc}(1 - C/p^2), 1], the archimedean MC interval,
    and the volume factor. Two volume factors are reported: the asymptotic
    V_N A^N/(2 zeta(N)) and the exact primitive-vector count divided by 2,
    which is what the density product actually multiplies at finite A.
    """
    N = dimension(d, n)
    intervals = {}
    for p in sorted(set(target.support) | set(primes_up_to(P_trunc))):
        e_p, xi = target.place(p)
        if use_sandwich and e_p >= 1:
            meas = density_sandwich(d, n, p, e_p)
            norm = 1 - Fraction(1, p**N)
            intervals[p] = DensityInterval(meas.lower / norm, min(meas.upper / norm, Fraction(1)), "sandwich")
        else:
            intervals[p] = local_density(d, n, p, xi, e_p, depth=depth, budget=budget)
    # tail over primes beyond the truncation
    tail_sum = 0.0
    for p in primes_up_to(10**5):
        if p > P_trunc and p not in target.support:
            tail_sum += 1.0 / p**2
    tail_sum += 1e-5  # integral remainder beyond the sieve, over-estimated
    tail_lo = max(0.0, 1.0 - float(tail_constant) * tail_sum)
    rho_inf = real_density_interval(d, n, target, mc_samples, rng)
    lo = float(rho_inf.lower) * tail_lo
    hi = float(rho_inf.upper)
    for iv in intervals.values():
        lo *= float(iv.lower)
        hi *= float(iv.upper)
    Af = float(Fraction(A))
    asympt = unit_ball_volume(N) * Af**N / (2 * zeta(N))
    prim_half = _primitive_count(N, A, budget) / 2
    sigma = float(Fraction(target.sigma_inf))
    return {
        "finite_intervals": intervals,
        "tail_lower": tail_lo,
        "rho_inf": rho_inf,
        "density_product": (lo, hi),
        "asymptotic_factor": asympt,
        "finite_size_factor": prim_half,
        "main_interval": (lo * asympt, hi * asympt),
        "finite_size_interval": (lo * prim_half, hi * prim_half),
        "magnitude_scale": sigma * Af**N / target.q,
    }


def _primitive_count(N: int, A, budget: int) -> int:
    pts = integer_ball(N, int(Fraction(A) ** 2), include_zero=False)
    if len(pts) > budget:
        raise EnumerationBudgetExceeded("coefficient ball too large", len(pts))
    return int((np.gcd.reduce(np.abs(pts), axis=1) == 1).sum())


# ---------------------------------------------------------------------------
# least heights


def least_point_heights(
    d: int,
    n: int,
    A,
    target: AdelicTarget,
    height_cap: float = 16.0,
    budget: int = 10**7,
):
    """Per-form least height of a rational point near the target, up to a cap.

    Returns (per-form list of (form, height or None), delta-grid summary of
    the fraction of soluble forms with least height below delta q^(n-1) A).
    """
    forms = enumerate_hypersurfaces(d, n, A, budget)
    cone = translate_local_conditions(target)
    pts = _candidate_points(d, n, height_cap, cone, budget)
    basis = monomial_basis(d, n)
    heights = []
    if len(pts):
        NU = veronese_batch(basis, pts.astype(object))
        h2 = (pts.astype(object) ** 2).sum(axis=1)
        e = n + 1 - d
        order = np.argsort([float(v) for v in h2], kind="stable")
        NU = NU[order]
        h2 = h2[order]
    for form in forms:
        best = None
        if len(pts):
            vals = NU @ np.array(form.coeffs, dtype=object)
            for v, hh in zip(vals, h2):
                if v == 0:
                    best = float(hh) ** (e / 2.0)
                    break
        heights.append((form, best))
    frak_q = float(target.frak_q)
    Af = float(Fraction(A))
    soluble = [h for _, h in heights if h is not None]
    summary = []
    for delta in (0.05, 0.1, 0.2, 0.5, 1.0):
        threshold = delta * frak_q ** (n - 1) * Af
        frac = (
            sum(1 for h in soluble if h < threshold) / len(soluble) if soluble else 0.0
        )
        summary.append({"delta": delta, "threshold": threshold, "fraction_below": frac})
    return heights, summary
