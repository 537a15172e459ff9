"""Polynomials with exact rational-complex coefficients, and their bounds.

A polynomial is a normalized term list (graded-lex order, no duplicate
monomials, no zero coefficients) over a fixed ambient variable count. The
degree is always taken from the actual terms, never declared, because the
weighted coefficient norm and the curvature bound below are degree-sensitive.

The curvature bound: for a square system f and a point x where Df(x) is
invertible,

    gamma(f, x)^2  <=  mu^2 * D^3 / (4 * ||x||_1^2),
    mu^2 = max{1, ||f||^2 * ||Df(x)^{-1} Delta||_F^2},

where ||f|| is the weighted coefficient norm, D the maximal degree, and
Delta the diagonal matrix with entries sqrt(d_i) * ||x||_1^(d_i - 1). The
squared form keeps the whole computation rational in exact mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath as mp

from .errors import DimensionMismatch, ValidationError
from .linalg import CMatrix, CVector, invert, norm1_sq
from .scalars import EC_ONE, ExactComplex, abs_sq, exact_to_mpc, fraction_to_mpf


@dataclass(frozen=True)
class Monomial:
    """Exponent vector of one term; length equals the ambient variable count."""

    exponents: tuple

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ValidationError("negative exponent in monomial")
        object.__setattr__(self, "exponents", exps)

    @property
    def total_degree(self) -> int:
        return sum(self.exponents)

    def value_at(self, x: CVector):
        acc = None
        for xi, e in zip(x, self.exponents):
            if e == 0:
                continue
            p = xi**e
            acc = p if acc is None else acc * p
        return acc  # None means the monomial is constant 1


@dataclass(frozen=True)
class Polynomial:
    """Normalized term list; immutable and hashable."""

    nv: int
    terms: tuple  # of (ExactComplex, Monomial), graded-lex descending

    @staticmethod
    def from_terms(nv: int, items) -> "Polynomial":
        """Build from (coefficient, exponents) pairs, merging and pruning."""
        acc = {}
        for coeff, mono in items:
            if not isinstance(coeff, ExactComplex):
                coeff = ExactComplex.of(coeff)
            exps = mono.exponents if isinstance(mono, Monomial) else tuple(int(e) for e in mono)
            if len(exps) != nv:
                raise DimensionMismatch(
                    f"monomial has {len(exps)} exponents in a {nv}-variable polynomial"
                )
            acc[exps] = acc.get(exps, ExactComplex()) + coeff
        terms = []
        for exps in sorted(acc, key=lambda e: (sum(e), e), reverse=True):
            c = acc[exps]
            if not c.is_zero():
                terms.append((c, Monomial(exps)))
        return Polynomial(nv, tuple(terms))

    @property
    def degree(self) -> int:
        """Max total degree over terms; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return self.terms[0][1].total_degree

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, x: CVector):
        if len(x) != self.nv:
            raise DimensionMismatch(f"point has {len(x)} coordinates, expected {self.nv}")
        total = None
        for coeff, mono in self.terms:
            mv = mono.value_at(x)
            term = coeff if mv is None else coeff * mv
            total = term if total is None else total + term
        if total is None:
            return ExactComplex()
        return total

    def derivative(self, j: int) -> "Polynomial":
        """Partial derivative with respect to variable j (symbolic)."""
        items = []
        for coeff, mono in self.terms:
            e = mono.exponents[j]
            if e == 0:
                continue
            exps = list(mono.exponents)
            exps[j] = e - 1
            items.append((coeff * e, tuple(exps)))
        return Polynomial.from_terms(self.nv, items)


def variable(nv: int, j: int) -> Polynomial:
    exps = [0] * nv
    exps[j] = 1
    return Polynomial.from_terms(nv, [(EC_ONE, tuple(exps))])


def constant(nv: int, c) -> Polynomial:
    return Polynomial.from_terms(nv, [(ExactComplex.of(c), (0,) * nv)])


@dataclass(frozen=True)
class PolynomialSystem:
    """A list of polynomials sharing one ambient variable count."""

    polys: tuple

    def __post_init__(self):
        polys = tuple(self.polys)
        if polys:
            nv = polys[0].nv
            for p in polys:
                if p.nv != nv:
                    raise DimensionMismatch("polynomials disagree on variable count")
        object.__setattr__(self, "polys", polys)

    @property
    def n(self) -> int:
        return len(self.polys)

    @property
    def nv(self) -> int:
        return self.polys[0].nv if self.polys else 0

    @property
    def degrees(self) -> tuple:
        return tuple(p.degree for p in self.polys)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)


@lru_cache(maxsize=256)
def _lifted_terms(poly: Polynomial, bits: int):
    """Terms with coefficients materialized as mpc at the given precision."""
    return tuple((exact_to_mpc(c, bits), mono) for c, mono in poly.terms)


def _eval_poly(poly: Polynomial, x: CVector, exact: bool):
    if exact:
        return poly.evaluate(x)
    total = mp.mpc(0)
    for coeff, mono in _lifted_terms(poly, mp.mp.prec):
        mv = mono.value_at(x)
        total = total + (coeff if mv is None else coeff * mv)
    return total


def _point_is_exact(x: CVector) -> bool:
    for v in x:
        return isinstance(v, ExactComplex)
    return True


def evaluate(S: PolynomialSystem, x: CVector) -> CVector:
    """Evaluate every polynomial of S at x (direct term summation)."""
    if len(x) != S.nv and S.polys:
        raise DimensionMismatch(f"point has {len(x)} coordinates, expected {S.nv}")
    exact = _point_is_exact(x)
    return tuple(_eval_poly(p, x, exact) for p in S.polys)


@lru_cache(maxsize=1024)
def _derivative_row(poly: Polynomial):
    return tuple(poly.derivative(j) for j in range(poly.nv))


def jacobian(S: PolynomialSystem, x: CVector) -> CMatrix:
    """Entry (i, j) is the symbolic partial of poly i by variable j, at x."""
    if len(x) != S.nv and S.polys:
        raise DimensionMismatch(f"point has {len(x)} coordinates, expected {S.nv}")
    exact = _point_is_exact(x)
    return tuple(
        tuple(_eval_poly(d, x, exact) for d in _derivative_row(p)) for p in S.polys
    )


def bw_norm_sq(g) -> Fraction:
    """Squared weighted coefficient norm; accepts a Polynomial or a system.

    For one polynomial of degree d: (1/d!) * sum over terms of
    rho! * (d - |rho|)! * |a_rho|^2, where rho! is the product of the
    coordinate factorials. For a system: the sum over its polynomials.
    """
    if isinstance(g, PolynomialSystem):
        total = Fraction(0)
        for p in g.polys:
            total += bw_norm_sq(p)
        return total
    if g.is_zero():
        return Fraction(0)
    d = g.degree
    dfac = factorial(d)
    total = Fraction(0)
    for coeff, mono in g.terms:
        w = factorial(d - mono.total_degree)
        for e in mono.exponents:
            w *= factorial(e)
        total += Fraction(w, dfac) * coeff.abs2()
    return total


def delta_sq_entries(degrees, n1sq) -> list:
    """Squared diagonal entries d_i * n1sq^(d_i - 1) of the scaling matrix."""
    out = []
    for d in degrees:
        if d == 0:
            out.append(0 * n1sq)
        else:
            out.append(d * n1sq ** (d - 1))
    return out


def gamma_bound_poly_sq(S: PolynomialSystem, x: CVector, bits: int | None = None):
    """Squared curvature bound mu^2 * D^3 / (4 ||x||_1^2) for a square system.

    Exact rational in exact mode. Raises SingularMatrix when the Jacobian is
    not invertible; callers treat that as an infinite bound.
    """
    if S.n != S.nv:
        raise DimensionMismatch(f"system is not square: {S.n} polynomials, {S.nv} variables")
    n1sq = norm1_sq(x)
    J = jacobian(S, x)
    Jinv = invert(J, bits)
    dsq = delta_sq_entries(S.degrees, n1sq)
    # ||Jinv * Delta||_F^2 = sum_j Delta_jj^2 * (squared column norm j of Jinv)
    scaled = 0
    for j in range(S.n):
        col = 0
        for i in range(S.n):
            col = col + abs_sq(Jinv[i][j])
        scaled = scaled + dsq[j] * col
    fsq = bw_norm_sq(S)
    if not _point_is_exact(x):
        fsq = fraction_to_mpf(fsq, mp.mp.prec)
    musq_raw = fsq * scaled
    musq = musq_raw if musq_raw > 1 else 1 + 0 * musq_raw
    D = S.max_degree
    return musq * D**3 / (4 * n1sq)
