"""p-adic arithmetic with explicit finite precision, and Newton/Hensel lifting.

p-adic numbers are integers mod p^v with the precision v carried alongside;
every operation reports only digits its inputs justify. The three lifting
procedures are:

- hensel_lift: univariate, under the strict condition |f(a0)| < |f'(a0)|^2,
  returning a root mod p^target with |root - a0| <= |f(a0)/f'(a0)|;
- newton_real_root: univariate over R, certified by eta = |f|/|f'|^2 < 1/F
  with F = 2 max(max|f'|, max|f''|, 1) on the closed unit ball around the
  start, concluding |root - a0| <= (1 + F eta)|f(a0)/f'(a0)| <= 2|f/f'|;
- lift_hypersurface_point: multivariate via freezing all but the coordinate
  with the largest partial derivative, with the exact hypothesis checks
  e > 2l, l >= min valuation of the gradient, |f| <= p^-e.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisFailed, NonConvergence, PreconditionFailed
from .veronese import Form, evaluate_form, gradient_form


def valuation(x, p: int):
    """v_p(x) for an integer or Fraction; math.inf at 0."""
    if x == 0:
        return math.inf
    if isinstance(x, Fraction):
        return valuation(x.numerator, p) - valuation(x.denominator, p)
    x = abs(int(x))
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def padic_abs(x, p: int) -> float:
    """|x|_p = p^(-v_p(x)); 0 at x = 0."""
    v = valuation(x, p)
    return 0.0 if v is math.inf else float(p) ** (-v)


def padic_vec_norm(vec, p: int) -> float:
    """Max norm over the entries."""
    return max(padic_abs(x, p) for x in vec)


def vec_valuation(vec, p: int):
    return min(valuation(x, p) for x in vec)


def proj_distance_padic(x, y, p: int) -> float:
    """d_p(x, y) = max 2-minor |.|_p divided by the max norms."""
    if all(c == 0 for c in x) or all(c == 0 for c in y):
        raise ValueError("projective distance needs nonzero vectors")
    n = len(x)
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            m = x[i] * y[j] - x[j] * y[i]
            v = valuation(m, p)
            if v < best:
                best = v
    if best is math.inf:
        return 0.0
    return float(p) ** (-(best - vec_valuation(x, p) - vec_valuation(y, p)))


@dataclass(frozen=True)
class PadicApproxVector:
    """Entries mod p^precision, reduced into [0, p^precision)."""

    p: int
    precision: int
    entries: tuple

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        mod = self.p**self.precision
        for e in self.entries:
            if not 0 <= e < mod:
                raise ValueError("entries must be reduced mod p^precision")

    @property
    def is_primitive(self) -> bool:
        return any(e % self.p != 0 for e in self.entries)

    def reduce(self, precision: int) -> "PadicApproxVector":
        if precision > self.precision:
            raise ValueError("cannot gain precision by reduction")
        mod = self.p**precision
        return PadicApproxVector(self.p, precision, tuple(e % mod for e in self.entries))

    @classmethod
    def from_integers(cls, p: int, precision: int, entries) -> "PadicApproxVector":
        mod = p**precision
        return cls(p, precision, tuple(int(e) % mod for e in entries))


# ---------------------------------------------------------------------------
# univariate polynomials over Z


def poly_eval(coeffs, x, mod=None):
    """Horner evaluation of sum coeffs[i] x^i, optionally mod m."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
        if mod is not None:
            acc %= mod
    return acc


def poly_derivative(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:] or [0]


def hensel_lift(coeffs, alpha0: int, p: int, target_precision: int):
    """Root of an integer polynomial mod p^target by quadratic Newton steps.

    Requires |f(a0)|_p < |f'(a0)|_p^2 strictly (PreconditionFailed otherwise;
    the iteration is never run on a bad start). Returns (root, l, e0) with
    l = v_p(f'(a0)) and e0 = v_p(f(a0)); the exact root satisfies
    |root_exact - a0|_p <= p^-(e0 - l), and f(root) == 0 mod p^target.
    """
    if target_precision < 1:
        raise ValueError("target precision must be >= 1")
    dcoeffs = poly_derivative(coeffs)
    f0 = poly_eval(coeffs, alpha0)
    fp0 = poly_eval(dcoeffs, alpha0)
    l = valuation(fp0, p)
    e0 = valuation(f0, p)
    if not e0 > 2 * l:  # also rejects f'(a0) = 0 (l = inf)
        raise PreconditionFailed(
            f"need v(f(a0)) > 2 v(f'(a0)); got v(f)={e0}, v(f')={l}"
        )
    if f0 == 0:
        return alpha0 % p**target_precision, l, e0
    # work precision: enough digits that the root is pinned mod p^target
    K = target_precision + 2 * l + 1
    modK = p**K
    alpha = alpha0 % modK
    # invariant: v(f'(alpha)) = l throughout; update a = a - f(a)/f'(a)
    for _ in range(K.bit_length() + target_precision + 8):
        fa = poly_eval(coeffs, alpha, modK)
        if fa % (p ** min(K, target_precision + l)) == 0:
            va = valuation(fa, p) if fa else K
            if va - l >= target_precision:
                break
        fpa = poly_eval(dcoeffs, alpha, modK)
        unit = fpa // p**l
        inv = pow(unit % modK, -1, modK)
        step = (fa // p**l) * inv % modK
        alpha = (alpha - step) % modK
    else:
        raise NonConvergence("Hensel iteration failed to stabilize")
    root = alpha % p**target_precision
    return root, l, e0


def _poly_bound_on_unit_ball(coeffs, alpha0: float) -> float:
    """sum |c_i| (|a0| + 1)^i, an upper bound for |f| on B(a0, 1)."""
    base = abs(alpha0) + 1.0
    return math.fsum(abs(float(c)) * base**i for i, c in enumerate(coeffs))


def newton_margin(coeffs, alpha0: float) -> float:
    """F = 2 max(max|f'|, max|f''|, 1) over the closed unit ball around a0,
    via coefficient over-estimates (sound upper bounds)."""
    d1 = poly_derivative([float(c) for c in coeffs])
    d2 = poly_derivative(d1)
    return 2.0 * max(_poly_bound_on_unit_ball(d1, alpha0), _poly_bound_on_unit_ball(d2, alpha0), 1.0)


def newton_real_root(coeffs, alpha0: float, tol: float = 1e-12, max_iter: int = 200):
    """Certified real Newton iteration.

    Returns (root, distance_bound) with f(root) <= tol in absolute value and
    |root - a0| <= distance_bound = (1 + F eta) |f(a0)/f'(a0)|, which is
    < 2 |f(a0)/f'(a0)| whenever the precondition eta < 1/F holds.
    """
    fcoeffs = [float(c) for c in coeffs]
    dcoeffs = poly_derivative(fcoeffs)
    f0 = poly_eval(fcoeffs, alpha0)
    fp0 = poly_eval(dcoeffs, alpha0)
    if fp0 == 0:
        raise PreconditionFailed("f'(a0) = 0")
    F = newton_margin(coeffs, alpha0)
    eta = abs(f0) / fp0**2
    if not eta < 1.0 / F:
        raise PreconditionFailed(f"eta = {eta:.3g} >= 1/F = {1.0 / F:.3g}")
    bound = (1.0 + F * eta) * abs(f0 / fp0)
    alpha = alpha0
    for _ in range(max_iter):
        fa = poly_eval(fcoeffs, alpha)
        if abs(fa) <= tol:
            return alpha, bound
        fpa = poly_eval(dcoeffs, alpha)
        if fpa == 0:
            raise NonConvergence("derivative vanished during iteration")
        alpha = alpha - fa / fpa
    raise NonConvergence("Newton iteration missed the tolerance budget")


# ---------------------------------------------------------------------------
# multivariate lift on a hypersurface


@dataclass(frozen=True)
class LiftCertificate:
    """A verified p-adic point near xi on the hypersurface of the form.

    point: the lifted approximation mod p^target (primitive);
    e: verified valuation of f at the start; l: verified gradient valuation
    bound; the exact point satisfies d_p <= p^-(e - l).
    """

    p: int
    target_precision: int
    point: tuple
    e: int
    l: int

    @property
    def distance_exponent(self) -> int:
        return self.e - self.l

    def __post_init__(self):
        if not self.e > 2 * self.l:
            raise ValueError("certificate requires e > 2l")
        if self.target_precision < self.e - self.l:
            raise ValueError("target precision below the guaranteed distance")


def lift_hypersurface_point(
    form: Form,
    xi: PadicApproxVector,
    e: int,
    l: int,
    target_precision: int | None = None,
) -> LiftCertificate:
    """Verify the lifting hypotheses at xi exactly and run the 1-D lift.

    Hypotheses checked on the residue (sound at precision >= e):
      (a) f(xi) == 0 mod p^e,
      (b) e > 2 l*,   where p^-l* = max_i |df/dx_i(xi)|_p,
      (c) l >= l*  and e > 2l (so the certificate's distance bound holds).
    The coordinate with the largest partial derivative (smallest index on
    ties) is lifted by `hensel_lift` with all others frozen.
    """
    p = xi.p
    if not xi.is_primitive:
        raise HypothesisFailed("primitivity", "xi must have a unit entry")
    if xi.precision < e:
        raise HypothesisFailed("precision", "xi must carry at least e digits")
    if target_precision is None:
        target_precision = max(xi.precision, e + l + 1)
    n = form.basis.n
    if len(xi.entries) != n + 1:
        raise ValueError("xi does not match the ambient dimension")
    x = [int(c) for c in xi.entries]
    fval = evaluate_form(form, x)
    if fval % p**e != 0:
        raise HypothesisFailed("value", f"f(xi) != 0 mod p^{e}")
    grads = gradient_form(form, x)
    lstar = None
    pivot = None
    for i, g in enumerate(grads):
        v = valuation(g % p**xi.precision, p)
        v = min(v, xi.precision)
        if lstar is None or v < lstar:
            lstar, pivot = v, i
    if not e > 2 * lstar:
        raise HypothesisFailed("gradient", f"need e > 2 v(grad); got e={e}, v={lstar}")
    if l < lstar:
        raise HypothesisFailed("l-bound", f"stated l={l} below actual v(grad)={lstar}")
    if not e > 2 * l:
        raise HypothesisFailed("l-bound", f"need e > 2l; got e={e}, l={l}")
    # freeze everything except the pivot coordinate
    uni = _restrict_to_coordinate(form, x, pivot)
    root, _, _ = hensel_lift(uni, x[pivot], p, target_precision)
    lifted = list(x)
    lifted[pivot] = root
    point = PadicApproxVector.from_integers(p, target_precision, lifted)
    cert = LiftCertificate(p, target_precision, point.entries, e, l)
    verify_certificate(form, xi, cert)
    return cert


def _restrict_to_coordinate(form: Form, x, pivot: int):
    """Coefficients of t -> f(x with x[pivot] replaced by t)."""
    d = form.basis.d
    out = [0] * (d + 1)
    for a, exps in zip(form.coeffs, form.basis.monomials):
        if a == 0:
            continue
        coeff = a
        for j, ej in enumerate(exps):
            if j != pivot and ej:
                coeff *= x[j] ** ej
        out[exps[pivot]] += coeff
    return out


def verify_certificate(form: Form, xi: PadicApproxVector, cert: LiftCertificate):
    """Re-check a lift certificate from scratch; raises on any failure."""
    p = cert.p
    point = [int(c) for c in cert.point]
    mod = p**cert.target_precision
    val = evaluate_form(form, point) % mod
    if val != 0:
        raise HypothesisFailed("re-verify", "lifted point is not a root to target precision")
    if all(c % p == 0 for c in point):
        raise HypothesisFailed("re-verify", "lifted point is not primitive")
    # the lift must stay within p^-(e-l) of xi projectively
    w = min(cert.target_precision, xi.precision)
    xred = [c % p**w for c in xi.entries]
    dist_ok = _projective_congruent(point, xred, p, min(w, cert.distance_exponent))
    if not dist_ok:
        raise HypothesisFailed("re-verify", "lifted point drifted from xi")


def _projective_congruent(x, y, p: int, k: int) -> bool:
    """d_p([x], [y]) <= p^-k for primitive residues known mod >= p^k."""
    if k <= 0:
        return True
    mod = p**k
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            if (x[i] * y[j] - x[j] * y[i]) % mod != 0:
                return False
    return True
