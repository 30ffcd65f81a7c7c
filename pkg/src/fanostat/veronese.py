"""Degree-d monomial combinatorics: the Veronese map, forms, and heights.

A degree-d hypersurface in P^n is stored as a primitive integer coefficient
vector indexed by the monomials of degree d in X_0..X_n, ordered by
descending lexicographic order on exponent vectors (X_0 heaviest). That
order is fixed once so serialized forms are bit-stable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


def dimension(d: int, n: int) -> int:
    """Number of degree-d monomials in n+1 variables, binomial(n+d, d)."""
    return math.comb(n + d, d)


@dataclass(frozen=True)
class MonomialBasis:
    d: int
    n: int
    monomials: tuple  # exponent vectors (d_0, ..., d_n), descending lex

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ValueError("need d >= 1 and n >= 1")
        if len(self.monomials) != dimension(self.d, self.n):
            raise ValueError("wrong number of monomials")

    @property
    def size(self) -> int:
        return len(self.monomials)

    def exponent_matrix(self) -> np.ndarray:
        return np.array(self.monomials, dtype=np.int64)

    def index(self, exponents) -> int:
        return self.monomials.index(tuple(exponents))


@lru_cache(maxsize=None)
def monomial_basis(d: int, n: int) -> MonomialBasis:
    exps = [
        tuple(e)
        for e in itertools.product(range(d + 1), repeat=n + 1)
        if sum(e) == d
    ]
    exps.sort(reverse=True)
    return MonomialBasis(d, n, tuple(exps))


def veronese(basis: MonomialBasis, x):
    """(M(x))_M in basis order; exact over ints/Fractions, float otherwise."""
    if len(x) != basis.n + 1:
        raise ValueError(f"need a vector of length {basis.n + 1}")
    out = []
    for exps in basis.monomials:
        val = 1
        for xi, e in zip(x, exps):
            if e:
                val *= xi**e
        out.append(val)
    return out


def veronese_jet(basis: MonomialBasis, x):
    """(nu(x), nu^(0)(x), ..., nu^(n)(x)).

    The i-th derivative vector holds (dM/dx_i)(x) for each monomial M, so
    the gradient of the form with coefficients a is <a, nu^(i)(x)>.
    """
    if len(x) != basis.n + 1:
        raise ValueError(f"need a vector of length {basis.n + 1}")
    value = veronese(basis, x)
    jets = []
    for i in range(basis.n + 1):
        row = []
        for exps in basis.monomials:
            e = exps[i]
            if e == 0:
                row.append(0 * x[0])
                continue
            val = e
            for j, (xj, ej) in enumerate(zip(x, exps)):
                pw = ej - 1 if j == i else ej
                if pw:
                    val *= xj**pw
            row.append(val)
        jets.append(row)
    return value, jets


def veronese_batch(basis: MonomialBasis, pts: np.ndarray) -> np.ndarray:
    """Row-wise Veronese of an integer/float point array (k, n+1) -> (k, N)."""
    E = basis.exponent_matrix()  # (N, n+1)
    out = np.ones((pts.shape[0], basis.size), dtype=pts.dtype)
    for j in range(basis.n + 1):
        col = pts[:, j]
        for t in range(basis.size):
            e = E[t, j]
            if e:
                out[:, t] *= col**e
    return out


@dataclass(frozen=True)
class Form:
    """A degree-d form as an integer coefficient vector in basis order.

    Kept primitive with canonical sign (first nonzero coefficient positive)
    when constructed through `make_form`; (a, -a) cut the same hypersurface.
    """

    basis: MonomialBasis
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.basis.size:
            raise ValueError("coefficient count does not match the basis")
        if all(c == 0 for c in self.coeffs):
            raise ValueError("the zero form does not define a hypersurface")

    @property
    def is_primitive(self) -> bool:
        return math.gcd(*[abs(c) for c in self.coeffs]) == 1

    def norm_squared(self) -> int:
        return sum(c * c for c in self.coeffs)

    def __str__(self):
        coeffs = " ".join(str(c) for c in self.coeffs)
        return f"{self.basis.d} {self.basis.n} : {coeffs}"


def make_form(d: int, n: int, coeffs, primitive: bool = True) -> Form:
    """Build a form, normalizing sign; with primitive=True divide out content."""
    coeffs = [int(c) for c in coeffs]
    if all(c == 0 for c in coeffs):
        raise ValueError("the zero form does not define a hypersurface")
    if primitive:
        g = math.gcd(*[abs(c) for c in coeffs])
        coeffs = [c // g for c in coeffs]
    first = next(c for c in coeffs if c != 0)
    if first < 0:
        coeffs = [-c for c in coeffs]
    return Form(monomial_basis(d, n), tuple(coeffs))


def parse_form(text: str) -> Form:
    """Parse the canonical text format `d n : c1 c2 ... cN`."""
    head, _, tail = text.partition(":")
    try:
        d, n = map(int, head.split())
        coeffs = [int(t) for t in tail.split()]
    except ValueError as exc:
        raise ValueError(f"malformed form string: {text!r}") from exc
    form = make_form(d, n, coeffs, primitive=False)
    if len(coeffs) != form.basis.size:
        raise ValueError("coefficient count does not match d, n")
    return form


def evaluate_form(form: Form, x):
    """f_a(x), exact over ints/Fractions; Kahan-compensated for floats."""
    nu = veronese(form.basis, x)
    if any(isinstance(v, float) for v in nu):
        return math.fsum(float(a) * float(v) for a, v in zip(form.coeffs, nu))
    return sum(a * v for a, v in zip(form.coeffs, nu))


def gradient_form(form: Form, x):
    """(df/dx_i)(x) for i = 0..n via <a, nu^(i)(x)>."""
    _, jets = veronese_jet(form.basis, x)
    out = []
    for row in jets:
        if any(isinstance(v, float) for v in row):
            out.append(math.fsum(float(a) * float(v) for a, v in zip(form.coeffs, row)))
        else:
            out.append(sum(a * v for a, v in zip(form.coeffs, row)))
    return out


def height(d: int, n: int, x) -> float:
    """H(x) = |x|^(n+1-d) for a primitive nonzero integer vector."""
    if n + 1 - d < 1:
        raise ValueError("height needs n + 1 - d >= 1")
    x = [int(c) for c in x]
    if all(c == 0 for c in x):
        raise ValueError("height of the zero vector is undefined")
    if math.gcd(*[abs(c) for c in x]) != 1:
        raise ValueError("height expects primitive coordinates")
    return math.sqrt(sum(c * c for c in x)) ** (n + 1 - d)


def height_squared(d: int, n: int, x) -> int:
    """H(x)^2 = (|x|^2)^(n+1-d), exact; for exact height-bound comparisons."""
    if n + 1 - d < 1:
        raise ValueError("height needs n + 1 - d >= 1")
    return sum(int(c) ** 2 for c in x) ** (n + 1 - d)


def height_bound_norm2(d: int, n: int, B) -> Fraction:
    """Largest |x|^2 allowed by H(x) <= B, as an exact rational.

    H(x) <= B  iff  (|x|^2)^(n+1-d) <= B^2.
    """
    B = Fraction(B)
    if B < 1:
        return Fraction(-1)
    e = n + 1 - d
    target = B**2
    # exact integer part of target^(1/e) on numerator/denominator scale
    lo, hi = 0, int(target) + 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if Fraction(mid) ** e <= target:
            lo = mid
        else:
            hi = mid - 1
    return Fraction(lo)
