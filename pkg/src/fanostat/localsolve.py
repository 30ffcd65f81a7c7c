"""Local solubility of hypersurfaces: exact searches, sound verdicts, densities.

Solubility of f = 0 over Q_p near a target point is only semidecidable, so
every decision routine returns a TriState:

- yes: carries a lift certificate (p-adic) or a Newton/sign-change/exact-zero
  certificate (real) that re-verifies independently;
- no: carries the depth at which an exhaustive residue search emptied out
  (sound: an exact zero would reduce), or an interval-arithmetic exclusion
  certificate over the real cap;
- unknown: carries the exhausted budget.

Densities of the soluble locus in coefficient space are measured exactly by
classifying coefficient balls mod p^v: a ball meets the soluble locus iff
some admissible residue x has <a, nu(x)> == 0 mod p^v (the coefficient can
be adjusted inside the ball to an exact zero), and it certifiably lies
inside once some such x also has a unit-sized partial derivative, which
makes the zero stable under every coefficient perturbation of size p^-v.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import EnumerationBudgetExceeded, HypothesisFailed, PreconditionFailed
from .geom import Cone, cone_member, proj_distance_arch
from .numtheory import crt_combine, reduced_residues
from .padic import (
    LiftCertificate,
    PadicApproxVector,
    lift_hypersurface_point,
    newton_margin,
    newton_real_root,
    poly_derivative,
    poly_eval,
    valuation,
)
from .veronese import (
    Form,
    dimension,
    evaluate_form,
    gradient_form,
    monomial_basis,
    veronese,
    veronese_batch,
    veronese_jet,
)


# ---------------------------------------------------------------------------
# target data


@dataclass(frozen=True)
class AdelicTarget:
    """(xi_p, sigma_p = p^-e_p) at finitely many finite places plus the
    archimedean pair (xi_inf, sigma_inf)."""

    finite_places: tuple  # of (p, e_p, PadicApproxVector)
    xi_inf: tuple
    sigma_inf: object  # Fraction preferred (exact cone tests)

    def __post_init__(self):
        seen = set()
        for p, e_p, xi in self.finite_places:
            if e_p < 1:
                raise ValueError("finite places need e_p >= 1")
            if p in seen:
                raise ValueError("duplicate finite place")
            seen.add(p)
            if xi.p != p or xi.precision < e_p:
                raise ValueError("xi_p must be given mod at least p^e_p")
            if not xi.is_primitive:
                raise ValueError("xi_p must be primitive")
        if not 0 < Fraction(self.sigma_inf) <= 1:
            raise ValueError("sigma_inf must lie in (0, 1]")
        if all(c == 0 for c in self.xi_inf):
            raise ValueError("xi_inf must be nonzero")

    @property
    def q(self) -> int:
        out = 1
        for p, e_p, _ in self.finite_places:
            out *= p**e_p
        return out

    @property
    def frak_q(self) -> Fraction:
        return Fraction(self.q) / Fraction(self.sigma_inf)

    @property
    def support(self) -> tuple:
        return tuple(p for p, _, _ in self.finite_places)

    def place(self, p: int):
        for pp, e_p, xi in self.finite_places:
            if pp == p:
                return e_p, xi
        return 0, None

    @classmethod
    def trivial(cls, n: int, sigma_inf=Fraction(1)) -> "AdelicTarget":
        return cls(tuple(), (1,) + (0,) * n, Fraction(sigma_inf))


@dataclass(frozen=True)
class CongruenceCone:
    """The translated form of an adelic condition: x ≡ u c mod q for a unit u,
    and x in the cone C(xi_inf, sigma_inf)."""

    c: tuple
    q: int
    xi_inf: tuple
    sigma_inf: object

    def __post_init__(self):
        if all(v == 0 for v in self.c):
            raise ValueError("c must be nonzero")
        g = math.gcd(*[abs(int(v)) for v in self.c])
        if math.gcd(g, self.q) != 1:
            raise ValueError("c must have content coprime to q")

    def congruence_ok(self, x) -> bool:
        if self.q == 1:
            return True
        xm = tuple(int(v) % self.q for v in x)
        for u in reduced_residues(self.q):
            if all((a - u * b) % self.q == 0 for a, b in zip(xm, self.c)):
                return True
        return False

    def cone_ok(self, x) -> bool:
        return cone_member(Cone(self.xi_inf, self.sigma_inf), x)

    def admissible_residues(self) -> set:
        return {tuple((u * int(v)) % self.q for v in self.c) for u in reduced_residues(self.q)}


def translate_local_conditions(target: AdelicTarget) -> CongruenceCone:
    """CRT the finite-place targets into a single q-primitive congruence class.

    For primitive integer x the adelic proximity conditions are equivalent to
    x ≡ u c mod q for a unit u together with the archimedean cone condition.
    """
    if not target.finite_places:
        n = len(target.xi_inf) - 1
        return CongruenceCone((1,) + (0,) * n, 1, tuple(target.xi_inf), target.sigma_inf)
    pairs = []
    for p, e_p, xi in target.finite_places:
        mod = p**e_p
        pairs.append((tuple(e % mod for e in xi.entries), mod))
    combined, q = crt_combine(pairs)
    return CongruenceCone(tuple(combined), q, tuple(target.xi_inf), target.sigma_inf)


# ---------------------------------------------------------------------------
# tri-state verdicts


@dataclass(frozen=True)
class TriState:
    verdict: str  # "yes" | "no" | "unknown"
    certificate: object = None

    def __post_init__(self):
        if self.verdict not in ("yes", "no", "unknown"):
            raise ValueError("verdict must be yes/no/unknown")

    @classmethod
    def yes(cls, certificate) -> "TriState":
        return cls("yes", certificate)

    @classmethod
    def no(cls, certificate) -> "TriState":
        return cls("no", certificate)

    @classmethod
    def unknown(cls, report=None) -> "TriState":
        return cls("unknown", report)

    def __bool__(self):
        raise TypeError("TriState is not a boolean; inspect .verdict")


@dataclass(frozen=True)
class DensityInterval:
    lower: Fraction
    upper: Fraction
    method: str  # "sandwich" | "enumeration" | "monte-carlo" | "tail-bound"

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError("density interval must satisfy 0 <= lo <= hi <= 1")

    def width(self) -> Fraction:
        return self.upper - self.lower

    def midpoint(self) -> Fraction:
        return (self.upper + self.lower) / 2


# ---------------------------------------------------------------------------
# canonical projective residues mod p^v


def canonical_residue(x, p: int, v: int):
    """Scale a primitive residue by a unit so its first unit entry is 1."""
    mod = p**v
    x = [int(c) % mod for c in x]
    pivot = next((i for i, c in enumerate(x) if c % p != 0), None)
    if pivot is None:
        raise ValueError("residue is not primitive")
    inv = pow(x[pivot], -1, mod)
    return tuple(c * inv % mod for c in x)


def canonical_projective_residues(m: int, p: int, v: int):
    """All canonical primitive residues mod p^v in m coordinates.

    Canonical: entries before the pivot divisible by p, pivot entry 1.
    """
    mod = p**v
    nonunits = [c for c in range(mod) if c % p == 0]
    out = []
    for pivot in range(m):
        heads = itertools.product(nonunits, repeat=pivot)
        tails = itertools.product(range(mod), repeat=m - pivot - 1)
        tails = list(tails)
        for h in heads:
            for t in tails:
                out.append(h + (1,) + t)
    return out


def _proximity_class(xi: PadicApproxVector, e_p: int):
    return canonical_residue(xi.entries, xi.p, e_p)


def _lift_children(x, p: int, v: int):
    """Canonical representatives mod p^(v+1) reducing to canonical x mod p^v."""
    m = len(x)
    children = set()
    for t in itertools.product(range(p), repeat=m):
        child = tuple((x[i] + p**v * t[i]) for i in range(m))
        children.add(canonical_residue(child, p, v + 1))
    return children


# ---------------------------------------------------------------------------
# p-adic membership decision


def decide_padic_solubility(
    form: Form,
    p: int,
    xi: Optional[PadicApproxVector] = None,
    e_p: int = 0,
    depth_budget: int = 3,
    node_budget: int = 10**7,
) -> TriState:
    """Does the hypersurface have a Q_p point within p^-e_p of xi?

    With xi None (or e_p = 0) this is plain Q_p-solubility. Searches residue
    zeros level by level; `yes` once some residue satisfies the lifting
    hypotheses, `no` once a level holds no admissible residue zero (sound:
    exact zeros reduce), `unknown` when the depth budget runs out.
    """
    n = form.basis.n
    if e_p > 0 and xi is None:
        raise ValueError("a target residue is required when e_p >= 1")
    v0 = max(e_p, 1)
    if e_p >= 1:
        base = _proximity_class(xi, e_p)
        frontier = {base} if evaluate_form(form, base) % p**e_p == 0 else set()
        v = e_p
    else:
        frontier = {
            x
            for x in canonical_projective_residues(n + 1, p, 1)
            if evaluate_form(form, x) % p == 0
        }
        v = 1
    nodes = 0
    while True:
        if not frontier:
            return TriState.no({"depth": v, "reason": "no admissible residue zero"})
        for x in sorted(frontier):
            exact = _centered(x, p, v)
            if any(exact) and evaluate_form(form, exact) == 0:
                # an exact integer zero is a complete certificate by itself
                return TriState.yes({"kind": "exact-integer-zero", "point": exact, "depth": v})
            cert = _try_lift(form, x, p, v, e_p)
            if cert is not None:
                return TriState.yes(cert)
        if v >= max(depth_budget, v0):
            return TriState.unknown({"depth": v, "frontier": len(frontier)})
        nxt = set()
        modnext = p ** (v + 1)
        for x in frontier:
            for child in _lift_children(x, p, v):
                nodes += 1
                if nodes > node_budget:
                    raise EnumerationBudgetExceeded("residue search too large", nodes)
                if evaluate_form(form, child) % modnext == 0:
                    nxt.add(child)
        frontier = nxt
        v += 1


def _centered(x, p: int, v: int):
    """Representative with entries in (-p^v/2, p^v/2]."""
    mod = p**v
    return tuple(c - mod if c > mod // 2 else c for c in x)


def _try_lift(form: Form, x, p: int, v: int, e_p: int):
    """Certificate via the lifting lemma at e = v if the hypotheses hold and
    the lifted point provably stays within p^-e_p of the target."""
    grads = gradient_form(form, x)
    lstar = None
    for g in grads:
        gv = valuation(g % p**v, p)
        gv = min(gv, v)
        lstar = gv if lstar is None else min(lstar, gv)
    if lstar is None or not (v > 2 * lstar) or v - lstar < e_p:
        return None
    try:
        xi_vec = PadicApproxVector.from_integers(p, v, x)
        return lift_hypersurface_point(form, xi_vec, v, lstar)
    except (HypothesisFailed, PreconditionFailed):
        return None


# ---------------------------------------------------------------------------
# real membership decision


class _Interval:
    """Closed interval with outward rounding (sound over floats)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        self.lo = float(lo)
        self.hi = float(hi)

    @staticmethod
    def _down(x):
        return math.nextafter(x, -math.inf)

    @staticmethod
    def _up(x):
        return math.nextafter(x, math.inf)

    def __add__(self, other):
        other = other if isinstance(other, _Interval) else _Interval(other)
        return _Interval(self._down(self.lo + other.lo), self._up(self.hi + other.hi))

    def __sub__(self, other):
        other = other if isinstance(other, _Interval) else _Interval(other)
        return _Interval(self._down(self.lo - other.hi), self._up(self.hi - other.lo))

    def __mul__(self, other):
        other = other if isinstance(other, _Interval) else _Interval(other)
        prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return _Interval(self._down(min(prods)), self._up(max(prods)))

    def power(self, k: int):
        if k == 0:
            return _Interval(1.0)
        if k % 2 == 1 or self.lo >= 0:
            return _Interval(self._down(self.lo**k), self._up(self.hi**k))
        if self.hi <= 0:
            return _Interval(self._down(self.hi**k), self._up(self.lo**k))
        return _Interval(0.0, self._up(max(self.lo**k, self.hi**k)))

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __gt__(self, val):
        return self.lo > val

    def split(self):
        mid = 0.5 * (self.lo + self.hi)
        return _Interval(self.lo, mid), _Interval(mid, self.hi)

    def width(self):
        return self.hi - self.lo


def _form_on_box(form: Form, box) -> _Interval:
    total = _Interval(0.0)
    for a, exps in zip(form.coeffs, form.basis.monomials):
        if a == 0:
            continue
        term = _Interval(float(a))
        for iv, e in zip(box, exps):
            if e:
                term = term * iv.power(e)
        total = total + term
    return total


def _box_outside_cap(box, xi, sigma2: float) -> bool:
    """Sound test that a box misses the cap {d(x, xi) <= sigma}."""
    ip = _Interval(0.0)
    nx = _Interval(0.0)
    nxi = math.fsum(float(c) ** 2 for c in xi)
    for iv, c in zip(box, xi):
        ip = ip + iv * _Interval(float(c))
        nx = nx + iv * iv
    # outside iff <x,xi>^2 < (1 - sigma^2) |x|^2 |xi|^2 for every x in the box
    lhs = ip * ip
    rhs = nx * _Interval((1.0 - sigma2) * nxi)
    return lhs.hi < rhs.lo


def decide_real_solubility(
    form: Form,
    xi_inf,
    sigma_inf,
    grid_refinement: int = 2,
    subdivision_budget: int = 20000,
) -> TriState:
    """Does f vanish at a real point within projective distance sigma of xi?

    yes: an exact rational zero in the cap, a certified sign change between
    two cap points (intermediate value theorem along the connecting cap
    geodesic), or a certified 1-D Newton root that stays in the cap.
    no: outward-rounded interval arithmetic excludes zeros from the whole
    cap, covering projective space by cube faces. unknown otherwise.
    """
    sigma = float(sigma_inf)
    sigma2 = sigma * sigma
    n = form.basis.n
    cone = Cone(tuple(xi_inf), Fraction(sigma_inf) if not isinstance(sigma_inf, float) else sigma_inf)
    # --- yes paths on a rational direction grid
    grid = _direction_grid(n, grid_refinement, xi_inf)
    pos, neg = [], []
    for v in grid:
        if not cone_member(cone, v):
            continue
        val = evaluate_form(form, v)
        if val == 0:
            return TriState.yes({"kind": "exact-zero", "point": v})
        # track signs on a single cap component (nonneg inner product side)
        side = sum(a * b for a, b in zip(v, xi_inf))
        w = v if side >= 0 else tuple(-c for c in v)
        sval = val if (side >= 0 or form.basis.d % 2 == 0) else -val
        (pos if sval > 0 else neg).append(w)
    if pos and neg:
        return TriState.yes({"kind": "sign-change", "positive": pos[0], "negative": neg[0]})
    for v in pos + neg:
        cert = _newton_in_cap(form, v, xi_inf, sigma)
        if cert is not None:
            return TriState.yes(cert)
    # --- no path: interval exclusion over the cap
    work = []
    for k in range(n + 1):
        for sgn in (1.0, -1.0):
            box = [_Interval(-1.0, 1.0) for _ in range(n + 1)]
            box[k] = _Interval(sgn, sgn)
            work.append(box)
    examined = 0
    while work:
        box = work.pop()
        examined += 1
        if examined > subdivision_budget:
            return TriState.unknown({"reason": "subdivision budget", "pending": len(work) + 1})
        if _box_outside_cap(box, xi_inf, sigma2):
            continue
        fbox = _form_on_box(form, box)
        if not fbox.contains_zero():
            continue
        widths = [iv.width() for iv in box]
        j = max(range(n + 1), key=lambda i: widths[i])
        if widths[j] < 1e-6:
            return TriState.unknown({"reason": "cells too small to split", "box": [(iv.lo, iv.hi) for iv in box]})
        left, right = box[j].split()
        for part in (left, right):
            nb = list(box)
            nb[j] = part
            work.append(nb)
    return TriState.no({"kind": "interval-exclusion", "cells": examined})


def _direction_grid(n: int, refinement: int, xi_inf):
    vals = range(-refinement, refinement + 1)
    out = set()
    for v in itertools.product(vals, repeat=n + 1):
        if any(v):
            g = math.gcd(*[abs(c) for c in v])
            w = tuple(c // g for c in v)
            first = next(c for c in w if c)
            out.add(w if first > 0 else tuple(-c for c in w))
    # include an integer approximation of the axis direction
    scale = 8
    norm = math.sqrt(math.fsum(float(c) ** 2 for c in xi_inf))
    approx = tuple(round(scale * float(c) / norm) for c in xi_inf)
    if any(approx):
        out.add(approx)
    return sorted(out)


def _newton_in_cap(form: Form, v, xi_inf, sigma: float):
    """Certified 1-D Newton line search from a rational cap point."""
    n = form.basis.n
    grads = gradient_form(form, v)
    order = sorted(range(n + 1), key=lambda i: -abs(float(grads[i])))
    for j in order[:2]:
        if grads[j] == 0:
            continue
        coeffs = _line_restriction(form, v, j)
        try:
            root, bound = newton_real_root(coeffs, 0.0)
        except Exception:  # precondition or convergence failure: not a cert
            continue
        # the exact zero z = v + alpha e_j with |alpha| <= bound; stay in cap?
        nv = math.sqrt(float(sum(c * c for c in v)))
        if bound >= 0.5 * nv:
            continue
        drift = bound / (nv - bound)  # d(v + t e_j, v) <= |t| |v| / (|v| (|v|-|t|))
        base = proj_distance_arch(v, xi_inf)
        if base + drift <= sigma - 1e-9:
            point = tuple(float(c) + (root if i == j else 0.0) for i, c in enumerate(v))
            return {"kind": "newton-line", "start": v, "axis": j, "point": point, "distance_bound": bound}
    return None


def _line_restriction(form: Form, v, j: int):
    """Integer coefficients of t -> f(v + t e_j)."""
    d = form.basis.d
    out = [0] * (d + 1)
    for a, exps in zip(form.coeffs, form.basis.monomials):
        if a == 0:
            continue
        ej = exps[j]
        # expand (v_j + t)^ej times the frozen part
        frozen = a
        for i, e in enumerate(exps):
            if i != j and e:
                frozen *= v[i] ** e
        for k in range(ej + 1):
            out[k] += frozen * math.comb(ej, k) * v[j] ** (ej - k)
    return out


# ---------------------------------------------------------------------------
# coefficient-ball classification and densities


@dataclass(frozen=True)
class BallClassification:
    p: int
    v: int
    e_p: int
    v_tilde: int
    omega0: int  # balls certified inside the soluble locus
    omega1: int  # balls meeting the soluble locus (exact)
    n_dim: int
    N_dim: int

    @property
    def boundary_upper(self) -> int:
        """Upper count for boundary balls (includes uncertified interiors)."""
        return self.omega1 - self.omega0

    @property
    def paper_boundary_bound(self) -> int:
        return self.p ** (self.v * self.N_dim) // self.p ** (
            self.v - self.v_tilde + (self.n_dim + 1) * min(self.e_p, self.v_tilde)
        )

    def measure_interval(self) -> DensityInterval:
        """Exact enclosure of the prim-coefficient measure of the soluble set."""
        total = Fraction(self.p ** (self.v * self.N_dim))
        return DensityInterval(Fraction(self.omega0) / total, Fraction(self.omega1) / total, "enumeration")

    def rho_interval(self) -> DensityInterval:
        """Projective-space density: measure divided by (1 - p^-N)."""
        norm = 1 - Fraction(1, self.p**self.N_dim)
        m = self.measure_interval()
        return DensityInterval(m.lower / norm, min(m.upper / norm, Fraction(1)), "enumeration")


def classify_balls(
    d: int,
    n: int,
    p: int,
    v: int,
    xi: Optional[PadicApproxVector] = None,
    e_p: int = 0,
    budget: int = 10**7,
    chunk: int = 1 << 14,
) -> BallClassification:
    """Exact Omega_1 / certified Omega_0 classification of coefficient balls.

    A ball B(a, p^-v) meets the soluble-near-xi locus iff some admissible
    residue x mod p^v (primitive, within p^-e_p of xi projectively) has
    <a, nu(x)> == 0 mod p^v: the coefficient vector can then be perturbed
    inside the ball to vanish at an exact lift of x, and conversely any
    exact zero reduces. The ball provably lies inside once additionally
    some <a, nu^(i)(x)> != 0 mod p^v_tilde: the zero then survives every
    coefficient perturbation of size p^-v by the lifting lemma with
    e = v, l = v_tilde - 1.
    """
    if v < 1 or (e_p > v):
        raise ValueError("need v >= max(e_p, 1)")
    if e_p >= 1 and xi is None:
        raise ValueError("need the target residue when e_p >= 1")
    N = dimension(d, n)
    total = p ** (v * N)
    if total > budget:
        raise EnumerationBudgetExceeded("too many coefficient balls", total)
    v_tilde = min(-(-v // 2), v - e_p + 1)
    basis = monomial_basis(d, n)
    xs = _admissible_residues(n + 1, p, v, xi, e_p)
    if not xs:
        return BallClassification(p, v, e_p, v_tilde, 0, 0, n, N)
    X = np.array(xs, dtype=np.int64)
    mod = p**v
    modt = p**v_tilde
    NU = veronese_batch(basis, X) % mod  # (k, N)
    jet_rows = []
    for x in xs:
        _, jets = veronese_jet(basis, x)
        jet_rows.append(jets)
    DIs = [
        np.array([[int(c) % modt for c in jets[i]] for jets in jet_rows], dtype=np.int64)
        for i in range(n + 1)
    ]
    omega0 = omega1 = 0
    digits = N
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        A = np.empty((len(idx), digits), dtype=np.int64)
        rem = idx.copy()
        for t in range(digits):
            A[:, t] = rem % mod
            rem //= mod
        prim = (A % p != 0).any(axis=1)
        if not prim.any():
            continue
        A = A[prim]
        zero = (A @ NU.T) % mod == 0  # (chunk, k)
        hit1 = zero.any(axis=1)
        good = np.zeros_like(zero)
        for DI in DIs:
            good |= (A @ DI.T) % modt != 0
        hit0 = (zero & good).any(axis=1)
        omega1 += int(hit1.sum())
        omega0 += int(hit0.sum())
    return BallClassification(p, v, e_p, v_tilde, omega0, omega1, n, N)


def _admissible_residues(m: int, p: int, v: int, xi, e_p: int):
    if e_p >= 1:
        base = _proximity_class(xi, e_p)
        out = []
        for t in itertools.product(range(p ** (v - e_p)), repeat=m):
            cand = tuple(base[i] + p**e_p * t[i] for i in range(m))
            out.append(canonical_residue(cand, p, v))
        return sorted(set(out))
    return canonical_projective_residues(m, p, v)


def density_sandwich(d: int, n: int, p: int, e_p: int) -> DensityInterval:
    """Exact rational bounds for the prim-coefficient measure of the soluble-
    near-xi locus at a finite place: independent of the target residue.

    (1 - p^(1-N) - p^-n) p^-e  <=  measure  <=  (1 - p^(1-N)) p^-e.
    """
    if e_p < 1:
        raise ValueError("the sandwich needs e_p >= 1")
    N = dimension(d, n)
    pe = Fraction(1, p**e_p)
    hi = (1 - Fraction(1, p ** (N - 1))) * pe
    lo = (1 - Fraction(1, p ** (N - 1)) - Fraction(1, p**n)) * pe
    return DensityInterval(lo, hi, "sandwich")


DEFAULT_TAIL_CONSTANT = Fraction(4)  # measured over small-p enumerations; not a proven value


def local_density(
    d: int,
    n: int,
    p: int,
    xi: Optional[PadicApproxVector] = None,
    e_p: int = 0,
    depth: int = 1,
    budget: int = 10**7,
    tail_constant: Fraction = DEFAULT_TAIL_CONSTANT,
) -> DensityInterval:
    """rho_p interval: enumeration when affordable, else the 1 - C/p^2 tail.

    The tail constant is a recorded measurement (insoluble mass times p^2,
    maxed over the enumerable range), not a constant from first principles.
    """
    v = max(depth, e_p, 1)
    N = dimension(d, n)
    if p ** (v * N) <= budget:
        return classify_balls(d, n, p, v, xi, e_p, budget).rho_interval()
    if e_p > 0:
        raise EnumerationBudgetExceeded("targeted density out of enumeration range")
    lo = 1 - tail_constant / p**2
    return DensityInterval(max(lo, Fraction(0)), Fraction(1), "tail-bound")


def fit_tail_constant(d: int, n: int, pmax: int = 3, budget: int = 10**7) -> Fraction:
    """max over enumerable p of (1 - rho_lower) * p^2: the recorded constant."""
    worst = Fraction(0)
    p = 2
    while p <= pmax:
        if p ** dimension(d, n) > budget:
            break
        interval = local_density(d, n, p, depth=1, budget=budget)
        worst = max(worst, (1 - interval.lower) * p * p)
        p = {2: 3, 3: 5, 5: 7, 7: 11, 11: 13}.get(p, p + 2)
    return worst


# ---------------------------------------------------------------------------
# finite-field counts


def count_projective_points(form: Form, p: int, budget: int = 10**8) -> int:
    """#V(F_p) by exhaustive enumeration of canonical projective points."""
    n = form.basis.n
    reps = (p ** (n + 1) - 1) // (p - 1)
    if reps > budget:
        raise EnumerationBudgetExceeded("too many projective points", reps)
    count = 0
    for pivot in range(n + 1):
        for tail in itertools.product(range(p), repeat=n - pivot):
            x = (0,) * pivot + (1,) + tail
            if evaluate_form(form, x) % p == 0:
                count += 1
    return count


def lang_weil_check(form: Form, p: int, r: int, d: int, constant: float) -> bool:
    """|#X(F_p) - p^r| <= (d-1)(d-2) p^(r-1/2) + constant * p^(r-1)."""
    count = count_projective_points(form, p)
    return abs(count - p**r) <= (d - 1) * (d - 2) * p ** (r - 0.5) + constant * p ** (r - 1)


def lang_weil_discrepancy(form: Form, p: int, r: int, d: int) -> float:
    """(|#X - p^r| - (d-1)(d-2) p^(r-1/2)) / p^(r-1): the fitted-constant scale."""
    count = count_projective_points(form, p)
    return (abs(count - p**r) - (d - 1) * (d - 2) * p ** (r - 0.5)) / p ** (r - 1)


def _gauss_solve_mod_p(A, b, p: int):
    """One solution of A x = b over F_p, or None."""
    A = [row[:] for row in A]
    b = list(b)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    where = [-1] * cols
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] % p != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        b[r], b[piv] = b[piv], b[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        b[r] = (b[r] * inv) % p
        for i in range(rows):
            if i != r and A[i][c] % p != 0:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
                b[i] = (b[i] - f * b[r]) % p
        where[c] = r
        r += 1
    for i in range(r, rows):
        if b[i] % p != 0:
            return None
    x = [0] * cols
    for c in range(cols):
        if where[c] >= 0:
            x[c] = b[where[c]] % p
    return x


def is_reducible_mod_p(form: Form, p: int, budget: int = 10**6) -> TriState:
    """Brute-force factor search f ≡ f' * f'' mod p over all degree splits.

    For each candidate f' (canonical up to scalar), divisibility is a linear
    system in the cofactor's coefficients. yes carries the witness pair.
    """
    d, n = form.basis.d, form.basis.n
    target = [c % p for c in form.coeffs]
    for d1 in range(1, d // 2 + 1):
        d2 = d - d1
        N1, N2 = dimension(d1, n), dimension(d2, n)
        candidates = (p**N1 - 1) // (p - 1)
        if candidates * N2 > budget:
            return TriState.unknown({"reason": "factor budget", "split": (d1, d2)})
        mul = _multiplication_matrix(d1, d2, n, p)
        for f1 in _canonical_coeff_vectors(N1, p):
            A = _specialize_multiplication(mul, f1, dimension(d, n), N2, p)
            g = _gauss_solve_mod_p(A, target, p)
            if g is not None and any(g):
                if _product_matches(d1, d2, n, f1, g, target, p):
                    return TriState.yes({"factor": tuple(f1), "cofactor": tuple(g), "split": (d1, d2)})
    return TriState.no({"exhausted_splits": [(d1, d - d1) for d1 in range(1, d // 2 + 1)]})


def _canonical_coeff_vectors(N: int, p: int):
    """Nonzero vectors in F_p^N up to scalar: first nonzero entry 1."""
    for lead in range(N):
        for tail in itertools.product(range(p), repeat=N - lead - 1):
            yield (0,) * lead + (1,) + tail


def _multiplication_matrix(d1: int, d2: int, n: int, p: int):
    """index pairs: product monomial row for each (e1, e2) pair."""
    b1 = monomial_basis(d1, n)
    b2 = monomial_basis(d2, n)
    b = monomial_basis(d1 + d2, n)
    table = []
    for i1, e1 in enumerate(b1.monomials):
        for i2, e2 in enumerate(b2.monomials):
            prod = tuple(a + bb for a, bb in zip(e1, e2))
            table.append((i1, i2, b.index(prod)))
    return table


def _specialize_multiplication(table, f1, Nout: int, N2: int, p: int):
    A = [[0] * N2 for _ in range(Nout)]
    for i1, i2, it in table:
        if f1[i1]:
            A[it][i2] = (A[it][i2] + f1[i1]) % p
    return A


def _product_matches(d1, d2, n, f1, g, target, p):
    b1 = monomial_basis(d1, n)
    b2 = monomial_basis(d2, n)
    b = monomial_basis(d1 + d2, n)
    prod = [0] * b.size
    for i1, e1 in enumerate(b1.monomials):
        if not f1[i1]:
            continue
        for i2, e2 in enumerate(b2.monomials):
            if not g[i2]:
                continue
            it = b.index(tuple(a + bb for a, bb in zip(e1, e2)))
            prod[it] = (prod[it] + f1[i1] * g[i2]) % p
    # allow a scalar multiple: find lambda with prod = lambda * target
    lam = None
    for a, t in zip(prod, target):
        if t % p != 0:
            lam = a * pow(t, -1, p) % p
            break
        if a % p != 0:
            return False
    if lam is None:
        return False
    return all((a - lam * t) % p == 0 for a, t in zip(prod, target))
